# Generated by Django 5.2.6 on 2026-10-18 09:12

import django.utils.timezone
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='SimulationRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('command', models.CharField(choices=[('run', 'Ensemble unique'), ('sweep', 'Balayage en kbar'), ('compare_dinf', 'Comparaison D∞'), ('reproduce_fig', 'Reproduction de figure')], max_length=20, verbose_name='Commande')),
                ('config', models.JSONField(default=dict, verbose_name='Configuration')),
                ('seed', models.DecimalField(blank=True, decimal_places=0, max_digits=20, null=True, verbose_name='Graine maîtresse')),
                ('output_path', models.CharField(blank=True, max_length=500, verbose_name='Fichier de sortie')),
                ('output_format', models.CharField(blank=True, max_length=10, verbose_name='Format')),
                ('status', models.CharField(choices=[('running', 'En cours'), ('success', 'Terminée'), ('failed', 'Échec')], default='running', max_length=10, verbose_name='Statut')),
                ('code_version', models.CharField(max_length=20, verbose_name='Version du code')),
                ('error_message', models.TextField(blank=True, verbose_name="Message d'erreur")),
                ('started_at', models.DateTimeField(default=django.utils.timezone.now, verbose_name='Début')),
                ('finished_at', models.DateTimeField(blank=True, null=True, verbose_name='Fin')),
                ('duration', models.DurationField(blank=True, null=True, verbose_name='Durée')),
            ],
            options={
                'verbose_name': 'Exécution',
                'verbose_name_plural': 'Exécutions',
                'ordering': ['-started_at'],
                'indexes': [models.Index(fields=['command', '-started_at'], name='run_command_started_idx')],
            },
        ),
    ]
