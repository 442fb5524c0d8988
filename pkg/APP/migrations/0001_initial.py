# Generated by Django 5.2.7 on 2026-10-19 10:00

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='ExperimentRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('comando', models.CharField(max_length=32, verbose_name='Subcomando')),
                ('config', models.JSONField(default=dict, verbose_name='Configuração resolvida')),
                ('seed_master', models.CharField(blank=True, default='', max_length=20, verbose_name='Semente mestre')),
                ('artifact_version', models.CharField(max_length=16, verbose_name='Versão dos artefatos')),
                ('veredito', models.CharField(choices=[('ok', 'OK'), ('falha', 'Falha na faixa de aceitação'), ('erro', 'Erro')], default='ok', max_length=5)),
                ('saidas', models.JSONField(default=list, verbose_name='Arquivos gerados')),
                ('criado_em', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'verbose_name': 'Execução',
                'verbose_name_plural': 'Execuções',
                'ordering': ['-criado_em', '-id'],
            },
        ),
    ]
