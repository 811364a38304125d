import math

def merge_boxes(*boxes):
    """Sampling boxes merged left to right; later ranges replace earlier ones."""
    out = {}
    for box in boxes:
        out.update(box)
    return out

def format_number(x):
    if x is None:
        return '-'
    if math.isnan(x) or math.isinf(x):
        return repr(float(x))
    if x == 0:
        return '0'
    return '{:.6g}'.format(x)

def json_safe(obj):
    """`obj` with non-finite floats replaced by None, for strict JSON."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return { k: json_safe(v) for k, v in obj.items() }
    if isinstance(obj, (list, tuple)):
        return [json_safe(v) for v in obj]
    return obj
