from rest_framework import serializers

from analytics.series import CurvePoint, DiffusionCurve, DiffusionEstimate, RateKind
from ensemble.config import SimulationMode
from ensemble.seeding import MAX_SEED
from quantum.recoil import RecoilDistribution


class WindowField(serializers.Field):
    """Fenêtre de kicks 'FIRST:LAST' (texte) ou [FIRST, LAST] (YAML)"""

    def to_internal_value(self, data):
        if isinstance(data, str):
            parts = data.split(':')
        elif isinstance(data, (list, tuple)):
            parts = list(data)
        else:
            raise serializers.ValidationError("Format attendu : FIRST:LAST")
        if len(parts) != 2:
            raise serializers.ValidationError("Format attendu : FIRST:LAST")
        try:
            first, last = (int(part) for part in parts)
        except (TypeError, ValueError):
            raise serializers.ValidationError("Les bornes de la fenêtre doivent être entières.")
        if not 0 <= first <= last:
            raise serializers.ValidationError(f"Fenêtre {first}:{last} vide ou négative.")
        return first, last

    def to_representation(self, value):
        return f"{value[0]}:{value[1]}"


class RunConfigSerializer(serializers.Serializer):
    """
    Validation d'une configuration d'exécution (clés du fichier --config / --set).
    Les valeurs par défaut viennent de settings.ROTOR_CONFIG, pas d'ici.
    """
    kappa = serializers.FloatField(min_value=0)
    kbar = serializers.FloatField(required=False, allow_null=True)
    eta = serializers.FloatField(min_value=0, max_value=1)
    alpha = serializers.FloatField()
    sigma_rho_over_kbar = serializers.FloatField(min_value=0)
    kicks = serializers.IntegerField(min_value=2)
    trajectories = serializers.IntegerField(min_value=1)
    groups = serializers.IntegerField(min_value=1)
    grid = serializers.IntegerField(min_value=32)
    substeps = serializers.CharField()
    recoil = serializers.ChoiceField(choices=[d.value for d in RecoilDistribution])
    seed = serializers.IntegerField(min_value=0, max_value=MAX_SEED)
    mode = serializers.ChoiceField(choices=[m.value for m in SimulationMode])
    leak_tolerance = serializers.FloatField()
    initial_window = WindowField()
    late_window = WindowField()
    classical_particles = serializers.IntegerField(min_value=10)
    classical_substeps = serializers.IntegerField(min_value=1)
    classical_noise = serializers.BooleanField()

    def validate_kbar(self, value):
        if value is not None and not value > 0:
            raise serializers.ValidationError("kbar doit être strictement positif.")
        return value

    def validate_alpha(self, value):
        if not 0 < value < 1:
            raise serializers.ValidationError("alpha doit être dans ]0, 1[.")
        return value

    def validate_substeps(self, value):
        if value == 'auto':
            return None
        try:
            substeps = int(value)
        except ValueError:
            raise serializers.ValidationError("substeps doit être 'auto' ou un entier.")
        if substeps < 1:
            raise serializers.ValidationError("substeps doit être ≥ 1.")
        return substeps

    def validate_leak_tolerance(self, value):
        if not 0 < value < 1:
            raise serializers.ValidationError("leak_tolerance doit être dans ]0, 1[.")
        return value

    def validate_grid(self, value):
        if value & (value - 1):
            raise serializers.ValidationError("grid doit être une puissance de deux.")
        return value

    def validate(self, data):
        if data['trajectories'] % data['groups']:
            raise serializers.ValidationError({
                'trajectories': f"{data['trajectories']} trajectoires ne se répartissent pas en {data['groups']} groupes."
            })
        return data


class CurvePointSerializer(serializers.Serializer):
    """Une ligne de courbe : mêmes champs que les colonnes CSV"""
    kbar = serializers.FloatField()
    kappa = serializers.FloatField(required=False)
    eta = serializers.FloatField(required=False)
    alpha = serializers.FloatField(required=False)
    rate_kind = serializers.ChoiceField(choices=RateKind.CHOICES)
    first_kick = serializers.IntegerField(min_value=0)
    last_kick = serializers.IntegerField(min_value=0)
    D = serializers.FloatField()
    D_stderr = serializers.FloatField(min_value=0)
    classical_D = serializers.FloatField(allow_null=True)
    n_trajectories = serializers.IntegerField(required=False)
    seed = serializers.IntegerField(required=False)

    def create(self, validated_data):
        estimate = DiffusionEstimate(
            validated_data['D'], validated_data['D_stderr'],
            (validated_data['first_kick'], validated_data['last_kick']),
        )
        return CurvePoint(validated_data['kbar'], validated_data['rate_kind'], estimate, validated_data['classical_D'])


class DiffusionCurveSerializer(serializers.Serializer):
    metadata = serializers.DictField()
    points = CurvePointSerializer(many=True)

    def create(self, validated_data):
        points = tuple(CurvePointSerializer().create(row) for row in validated_data['points'])
        return DiffusionCurve(points, dict(validated_data['metadata']))


class DinfComparisonSerializer(serializers.Serializer):
    kbar = serializers.FloatField()
    kappa = serializers.FloatField()
    eta = serializers.FloatField()
    D_inf_simulated = serializers.FloatField()
    D_inf_simulated_stderr = serializers.FloatField()
    D_inf_weighted = serializers.FloatField()
    D_inf_weighted_stderr = serializers.FloatField()
    discrepancy_sigma = serializers.FloatField(allow_null=True)
    D_inf_model = serializers.FloatField()
    model_based = serializers.BooleanField()
    n_trajectories = serializers.IntegerField()
    seed = serializers.IntegerField()
