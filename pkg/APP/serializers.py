"""
Serializers do laboratório: validação da configuração de cada subcomando e
formato dos resumos JSON.
"""
import math

from rest_framework import serializers

from .graphs import NAMED_GRAPHS
from .lemmacheck import LEMAS
from .models import ExperimentRun
from .sampler import Seed


def _finito(valor):
    return valor if valor is None or math.isfinite(valor) else None


# ==================== CONFIGURAÇÃO ====================

class LambdasField(serializers.ListField):
    child = serializers.FloatField(min_value=1e-12)

    def __init__(self, **kwargs):
        kwargs.setdefault('min_length', 1)
        super().__init__(**kwargs)


class BaseConfigSerializer(serializers.Serializer):
    """Campos comuns a todos os subcomandos"""
    seed = serializers.CharField()
    workers = serializers.IntegerField(min_value=1, max_value=256)
    out = serializers.CharField(allow_blank=True, required=False, default='')
    check = serializers.BooleanField(required=False, default=False)
    xlsx = serializers.CharField(allow_blank=True, required=False, default='')
    pdf = serializers.CharField(allow_blank=True, required=False, default='')

    def validate_seed(self, value):
        try:
            Seed.parse(value)
        except ValueError as e:
            raise serializers.ValidationError(f'semente inválida: {value}') from e
        return str(value)


class TypicalCellConfigSerializer(BaseConfigSerializer):
    lambdas = LambdasField()
    replicas = serializers.IntegerField(min_value=100)


class IsokawaConfigSerializer(BaseConfigSerializer):
    lambdas = LambdasField()


class DensityConfigSerializer(BaseConfigSerializer):
    lambdas = LambdasField()
    replicas = serializers.IntegerField(min_value=100)

    def validate_lambdas(self, value):
        if any(b >= a for a, b in zip(value, value[1:])):
            raise serializers.ValidationError('intensidades precisam estar em ordem decrescente')
        return value


class TessellateConfigSerializer(BaseConfigSerializer):
    lambdas = LambdasField()
    radius = serializers.FloatField(min_value=0.1, max_value=25.0)
    subwindow = serializers.FloatField(min_value=0.0)
    svg = serializers.CharField(allow_blank=True, required=False, default='')
    color = serializers.BooleanField(required=False, default=False)

    def validate(self, attrs):
        if attrs['subwindow'] >= attrs['radius']:
            raise serializers.ValidationError('a subjanela precisa ser menor que a janela')
        return attrs


class SurfaceConfigSerializer(BaseConfigSerializer):
    lambdas = LambdasField(child=serializers.FloatField(min_value=0.25))
    draws = serializers.IntegerField(min_value=1)


class ColorConfigSerializer(BaseConfigSerializer):
    lambdas = LambdasField(child=serializers.FloatField(min_value=0.25))
    trials = serializers.IntegerField(min_value=100)
    colorings = serializers.IntegerField(min_value=0)

    def validate_colorings(self, value):
        if value == 1:
            raise serializers.ValidationError('precisa de 0 (sem conferência) ou pelo menos 2 colorações')
        return value


class GraphConfigSerializer(BaseConfigSerializer):
    n = serializers.IntegerField(min_value=4)
    d = serializers.IntegerField(min_value=3)
    s = serializers.IntegerField(min_value=2)
    trials = serializers.IntegerField(min_value=1)

    def validate(self, attrs):
        if (attrs['n'] * attrs['d']) % 2 or attrs['n'] < 2 * attrs['s']:
            raise serializers.ValidationError('precisa n·d par e n >= 2s')
        return attrs


class ExactCheegerConfigSerializer(BaseConfigSerializer):
    graph = serializers.ChoiceField(choices=sorted(NAMED_GRAPHS) + ['random'])
    n = serializers.IntegerField(min_value=4, max_value=20, required=False, default=12)
    d = serializers.IntegerField(min_value=3, required=False, default=3)
    trials = serializers.IntegerField(min_value=1, required=False, default=200)


class LemmaConfigSerializer(BaseConfigSerializer):
    which = serializers.ChoiceField(choices=list(LEMAS) + ['all'])
    samples = serializers.IntegerField(min_value=1000)


class RenderConfigSerializer(BaseConfigSerializer):
    lambdas = LambdasField()
    radius = serializers.FloatField(min_value=0.1, max_value=25.0, required=False, default=6.0)
    width = serializers.IntegerField(min_value=64, max_value=8192)
    height = serializers.IntegerField(min_value=64, max_value=8192)
    stroke = serializers.FloatField(min_value=1e-3)
    svg = serializers.CharField(allow_blank=True, required=False, default='')
    color = serializers.BooleanField(required=False, default=False)
    nuclei = serializers.BooleanField(required=False, default=False)


CONFIG_SERIALIZERS = {
    'typical-cell': TypicalCellConfigSerializer,
    'isokawa-ref': IsokawaConfigSerializer,
    'density': DensityConfigSerializer,
    'tessellate': TessellateConfigSerializer,
    'surface': SurfaceConfigSerializer,
    'color': ColorConfigSerializer,
    'graph': GraphConfigSerializer,
    'exact-cheeger': ExactCheegerConfigSerializer,
    'lemma': LemmaConfigSerializer,
    'render': RenderConfigSerializer,
}


class TolerancesSerializer(serializers.Serializer):
    hiperboloide = serializers.FloatField(min_value=0, required=False)
    vertice = serializers.FloatField(min_value=0, required=False)
    bissetor = serializers.FloatField(min_value=0, required=False)
    degenerado = serializers.FloatField(min_value=0, required=False)
    coincidencia = serializers.FloatField(min_value=0, required=False)

    def validate(self, attrs):
        desconhecidas = set(self.initial_data) - set(self.fields)
        if desconhecidas:
            raise serializers.ValidationError(f'tolerâncias desconhecidas: {sorted(desconhecidas)}')
        return attrs


# ==================== RESULTADOS ====================

class FiniteFloatField(serializers.FloatField):
    """inf e nan viram null no JSON"""

    def to_representation(self, value):
        return _finito(float(value))


class MCEstimateSerializer(serializers.Serializer):
    mean = FiniteFloatField()
    stderr = FiniteFloatField()
    n = serializers.IntegerField()
    excluded = serializers.IntegerField()
    seed = serializers.CharField()


class RatioRowSerializer(serializers.Serializer):
    lam = serializers.FloatField()
    mean_area = MCEstimateSerializer()
    mean_perimeter = MCEstimateSerializer()
    ratio = FiniteFloatField()
    reference_perimeter = serializers.FloatField()
    density = FiniteFloatField()


class ColoringOutcomeSerializer(serializers.Serializer):
    black_area = serializers.FloatField()
    boundary_length = serializers.FloatField()
    cheeger_value = FiniteFloatField()
    cells = serializers.IntegerField()
    seed = serializers.CharField()


class ColoringSummarySerializer(serializers.Serializer):
    mean_black_area = MCEstimateSerializer()
    mean_boundary = MCEstimateSerializer()
    min_cheeger = FiniteFloatField()
    markov_threshold = serializers.FloatField()
    markov_bound = FiniteFloatField()
    void_bound = serializers.FloatField()


class VarianceCheckSerializer(serializers.Serializer):
    variance = serializers.FloatField()
    stderr = serializers.FloatField()
    identity = serializers.FloatField()
    colorings = serializers.IntegerField()
    seed = serializers.CharField()


class GraphColoringReportSerializer(serializers.Serializer):
    h_star = MCEstimateSerializer()
    boundary = MCEstimateSerializer()
    black = MCEstimateSerializer()


class LemmaReportSerializer(serializers.Serializer):
    lemma = serializers.CharField()
    params = serializers.DictField()
    verdict = serializers.CharField()
    max_slack = FiniteFloatField()
    samples = serializers.IntegerField()
    seed = serializers.CharField(allow_blank=True)
    approximation = serializers.CharField(allow_blank=True)
    details = serializers.DictField()


class ExperimentRunSerializer(serializers.ModelSerializer):
    """Linha do registro de execuções (subcomando runs)"""
    veredito_display = serializers.CharField(source='get_veredito_display', read_only=True)

    class Meta:
        model = ExperimentRun
        fields = [
            'id', 'comando', 'config', 'seed_master', 'artifact_version',
            'veredito', 'veredito_display', 'saidas', 'criado_em'
        ]
        read_only_fields = fields
