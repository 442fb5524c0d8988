from django.db import models


class ExperimentRun(models.Model):
    """Registro de cada execução do comando `lab` (proveniência; nunca entra nos artefatos)"""
    VEREDITO_CHOICES = [
        ('ok', 'OK'),
        ('falha', 'Falha na faixa de aceitação'),
        ('erro', 'Erro'),
    ]

    comando = models.CharField(max_length=32, verbose_name='Subcomando')
    config = models.JSONField(default=dict, verbose_name='Configuração resolvida')
    # semente de 64 bits não cabe em BigIntegerField com sinal
    seed_master = models.CharField(max_length=20, blank=True, default='', verbose_name='Semente mestre')
    artifact_version = models.CharField(max_length=16, verbose_name='Versão dos artefatos')
    veredito = models.CharField(max_length=5, choices=VEREDITO_CHOICES, default='ok')
    saidas = models.JSONField(default=list, verbose_name='Arquivos gerados')
    criado_em = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['-criado_em', '-id']
        verbose_name = 'Execução'
        verbose_name_plural = 'Execuções'

    def __str__(self):
        return f'{self.comando} ({self.get_veredito_display()})'
