# Generated by Django 5.2.9 on 2026-01-12 10:05

import django.db.models.deletion
from django.conf import settings
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
        migrations.swappable_dependency(settings.AUTH_USER_MODEL),
    ]

    operations = [
        migrations.CreateModel(
            name='ExperimentRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('kind', models.CharField(choices=[('brillouin', 'Brillouin'), ('curve', 'Curve'), ('hysteresis', 'Hysteresis'), ('critical-field', 'Critical Field'), ('angle-table', 'Angle Table'), ('roundtrip', 'Roundtrip')], max_length=20)),
                ('parameters', models.JSONField(blank=True, default=dict)),
                ('output_format', models.CharField(choices=[('csv', 'CSV'), ('json', 'JSON'), ('excel', 'EXCEL')], default='csv', max_length=10)),
                ('status', models.CharField(choices=[('pending', 'Pending'), ('running', 'Running'), ('completed', 'Completed'), ('failed', 'Failed')], default='pending', max_length=10)),
                ('output_file', models.FileField(blank=True, null=True, upload_to='experiments/')),
                ('record_count', models.PositiveIntegerField(default=0)),
                ('error_message', models.TextField(blank=True)),
                ('exit_code', models.IntegerField(blank=True, null=True)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('finished_at', models.DateTimeField(blank=True, null=True)),
                ('requested_by', models.ForeignKey(null=True, on_delete=django.db.models.deletion.SET_NULL, related_name='experiment_runs', to=settings.AUTH_USER_MODEL)),
            ],
            options={
                'ordering': ['-created_at'],
            },
        ),
    ]
