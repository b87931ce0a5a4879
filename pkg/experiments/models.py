from django.conf import settings
from django.db import models

from .config import FORMATS, KINDS


class ExperimentRun(models.Model):
    """
    A requested emulation run, executed asynchronously.
    Holds the validated parameters, the rendered output file, and the failure if any.
    """
    KIND_CHOICES = tuple((kind, kind.replace('-', ' ').title()) for kind in KINDS)
    FORMAT_CHOICES = tuple((fmt, fmt.upper()) for fmt in FORMATS)
    STATUS_CHOICES = (
        ('pending', 'Pending'),
        ('running', 'Running'),
        ('completed', 'Completed'),
        ('failed', 'Failed'),
    )

    kind = models.CharField(max_length=20, choices=KIND_CHOICES)
    parameters = models.JSONField(default=dict, blank=True)
    output_format = models.CharField(max_length=10, choices=FORMAT_CHOICES, default='csv')
    status = models.CharField(max_length=10, choices=STATUS_CHOICES, default='pending')
    output_file = models.FileField(upload_to='experiments/', null=True, blank=True)
    record_count = models.PositiveIntegerField(default=0)
    error_message = models.TextField(blank=True)
    exit_code = models.IntegerField(null=True, blank=True)
    requested_by = models.ForeignKey(
        settings.AUTH_USER_MODEL, on_delete=models.SET_NULL, null=True, related_name='experiment_runs'
    )
    created_at = models.DateTimeField(auto_now_add=True)
    finished_at = models.DateTimeField(null=True, blank=True)

    class Meta:
        ordering = ['-created_at']

    def __str__(self):
        return f"{self.kind} #{self.pk} ({self.status})"
