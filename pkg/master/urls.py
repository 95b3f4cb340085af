"""
URL configuration du simulateur.

Seule l'interface d'administration est exposée : elle sert à consulter le
registre des exécutions (experiments.SimulationRun).
"""
from django.contrib import admin
from django.urls import path

urlpatterns = [
    path('admin/', admin.site.urls),
]
