from django.db import models
from django.utils import timezone


class SimulationRun(models.Model):
    """
    Registre des exécutions : la configuration complète et la graine suffisent
    à régénérer n'importe quelle sortie.
    """
    COMMAND_CHOICES = [
        ('run', 'Ensemble unique'),
        ('sweep', 'Balayage en kbar'),
        ('compare_dinf', 'Comparaison D∞'),
        ('reproduce_fig', 'Reproduction de figure'),
    ]
    STATUS_CHOICES = [
        ('running', 'En cours'),
        ('success', 'Terminée'),
        ('failed', 'Échec'),
    ]

    command = models.CharField(
        max_length=20,
        choices=COMMAND_CHOICES,
        verbose_name="Commande"
    )
    config = models.JSONField(
        default=dict,
        verbose_name="Configuration"
    )
    seed = models.DecimalField(
        max_digits=20,
        decimal_places=0,
        null=True,
        blank=True,
        verbose_name="Graine maîtresse"
    )
    output_path = models.CharField(
        max_length=500,
        blank=True,
        verbose_name="Fichier de sortie"
    )
    output_format = models.CharField(
        max_length=10,
        blank=True,
        verbose_name="Format"
    )
    status = models.CharField(
        max_length=10,
        choices=STATUS_CHOICES,
        default='running',
        verbose_name="Statut"
    )
    code_version = models.CharField(
        max_length=20,
        verbose_name="Version du code"
    )
    error_message = models.TextField(
        blank=True,
        verbose_name="Message d'erreur"
    )
    started_at = models.DateTimeField(
        default=timezone.now,
        verbose_name="Début"
    )
    finished_at = models.DateTimeField(
        null=True,
        blank=True,
        verbose_name="Fin"
    )
    duration = models.DurationField(
        null=True,
        blank=True,
        verbose_name="Durée"
    )

    class Meta:
        ordering = ['-started_at']
        verbose_name = "Exécution"
        verbose_name_plural = "Exécutions"
        indexes = [
            models.Index(fields=['command', '-started_at'], name='run_command_started_idx'),
        ]

    def __str__(self):
        return f"{self.command} seed={self.seed} - {self.started_at.strftime('%Y-%m-%d %H:%M:%S')} ({self.status})"

    def finish(self, status, error_message=''):
        """Clôture l'exécution et calcule sa durée"""
        self.status = status
        self.error_message = error_message
        self.finished_at = timezone.now()
        self.duration = self.finished_at - self.started_at
        self.save(update_fields=['status', 'error_message', 'finished_at', 'duration'])
