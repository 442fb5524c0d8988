"""
Resolução da configuração de uma execução: padrões do settings, depois o
arquivo YAML, depois as flags da linha de comando.
"""
import logging
from dataclasses import dataclass, field
from pathlib import Path

import yaml
from django.conf import settings
from rest_framework import serializers

from .sampler import Seed
from .serializers import CONFIG_SERIALIZERS, TolerancesSerializer

logger = logging.getLogger(__name__)

# Não entram no eco da configuração: não mudam nenhum resultado
CAMPOS_FORA_DO_ECO = ('workers', 'out', 'check', 'xlsx', 'pdf', 'svg')


@dataclass
class RunConfig:
    command: str
    params: dict
    tolerancias: dict = field(default_factory=dict)

    @property
    def seed(self):
        return Seed.parse(self.params['seed'])

    @property
    def workers(self):
        return self.params['workers']

    def get(self, chave, padrao=None):
        return self.params.get(chave, padrao)

    def echo(self):
        """Configuração resolvida como aparece nos artefatos (ordem alfabética)"""
        eco = {'command': self.command, 'artifact_version': lab_settings()['ARTIFACT_VERSION']}
        eco.update({k: v for k, v in self.params.items() if k not in CAMPOS_FORA_DO_ECO})
        for nome, valor in sorted(self.tolerancias.items()):
            eco[f'tol_{nome}'] = valor
        return dict(sorted(eco.items()))


def lab_settings():
    return settings.VORONOI_LAB


def load_config_file(caminho):
    """Lê o YAML de configuração; o topo é um mapeamento subcomando → parâmetros"""
    if not caminho:
        return {}
    texto = Path(caminho).read_text(encoding='utf-8')
    dados = yaml.safe_load(texto) or {}
    if not isinstance(dados, dict):
        raise serializers.ValidationError(f'{caminho}: o arquivo precisa ser um mapeamento')
    for chave, valor in dados.items():
        if not isinstance(valor, dict):
            raise serializers.ValidationError(f'{caminho}: a seção {chave!r} precisa ser um mapeamento')
    logger.debug('configuração lida de %s: seções %s', caminho, sorted(dados))
    return dados


def resolve_config(command, flags=None, arquivo=None):
    """Mescla padrões, arquivo e flags (None nas flags = não informado) e valida"""
    if command not in CONFIG_SERIALIZERS:
        raise serializers.ValidationError(f'subcomando desconhecido: {command}')
    lab = lab_settings()
    dados = load_config_file(arquivo)

    bruto = {'workers': lab['WORKERS'], 'out': ''}
    bruto.update(lab['PADROES'].get(command, {}))
    bruto.update(dados.get(command, {}))
    bruto.update({k: v for k, v in (flags or {}).items() if v is not None})

    validador = CONFIG_SERIALIZERS[command](data=bruto)
    validador.is_valid(raise_exception=True)
    params = dict(validador.validated_data)
    desconhecidas = set(bruto) - set(params)
    if desconhecidas:
        raise serializers.ValidationError(f'parâmetros desconhecidos para {command}: {sorted(desconhecidas)}')

    tolerancias = TolerancesSerializer(data=dados.get('tolerancias', {}))
    tolerancias.is_valid(raise_exception=True)
    return RunConfig(command, params, dict(tolerancias.validated_data))


def output_path(cfg, nome):
    """Caminho de saída: --out explícito ou a pasta padrão (LAB_OUTPUT_DIR)"""
    if cfg.get('out'):
        return Path(cfg.get('out'))
    return Path(lab_settings()['OUTPUT_DIR']) / nome
