"""Arithmetic helpers used by the toy project."""


def clamp(x, lo, hi):
    if x < lo:
        return lo
    if x > hi:
        return hi
    return x


def safe_div(a, b):
    if b == 0:
        return None
    return a / b


def first_or_default(items, default):
    if not items:
        return default
    return items[0]


def scale(x, k):
    y = x * k
    z = y + 1
    w = z - 1
    return w
