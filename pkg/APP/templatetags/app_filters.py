import math

from django import template

register = template.Library()

@register.filter(name='format_num')
def format_num(value, digits=6):
    """
    Número com `digits` algarismos significativos; inf e None aparecem por extenso.
    """
    if value is None:
        return '-'
    value = float(value)
    if math.isinf(value):
        return '∞' if value > 0 else '-∞'
    return f'{value:.{int(digits)}g}'


@register.filter(name='verdict')
def verdict(value):
    return 'OK' if value == 'ok' else value.upper()
