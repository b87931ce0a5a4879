# Generated by Django 5.2.9 on 2026-10-17 09:12

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='Material',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('name', models.CharField(max_length=100, unique=True)),
                ('spin', models.FloatField(default=1.5)),
                ('lande_g', models.FloatField(default=2.0)),
                ('neighbors', models.PositiveIntegerField(default=6)),
                ('exchange_energy', models.FloatField(blank=True, help_text='J_ex in joule', null=True)),
                ('mean_field_parameter', models.FloatField(blank=True, help_text='λ in T/(J/T)', null=True)),
                ('target_critical_temperature', models.FloatField(blank=True, help_text='T_c in kelvin', null=True)),
                ('lambda_prime_ratio', models.FloatField(default=0.0, help_text="λ'/λ with M in units of g·μ_B·S")),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'ordering': ['name'],
            },
        ),
    ]
