"""
Sérialisation des courbes, comparaisons D_∞ et distributions finales.

CSV par pandas (point décimal, sans séparateur de milliers, flottants en
représentation exacte), JSON par orjson.
"""
import io
import logging
from pathlib import Path

import orjson
import pandas as pd

from analytics.series import DiffusionCurve, MomentumHistogram
from master.exceptions import ConfigError, OutputError
from .serializers import CurvePointSerializer, DiffusionCurveSerializer, DinfComparisonSerializer

logger = logging.getLogger(__name__)

CSV_COLUMNS = [
    'kbar', 'kappa', 'eta', 'alpha', 'rate_kind', 'first_kick', 'last_kick',
    'D', 'D_stderr', 'classical_D', 'n_trajectories', 'seed',
]
DINF_COLUMNS = list(DinfComparisonSerializer().fields)
FORMATS = ('csv', 'json')


def curve_rows(curve: DiffusionCurve):
    meta = curve.metadata
    rows = []
    for point in curve.points:
        first, last = point.estimate.kick_range
        rows.append({
            'kbar': point.kbar,
            'kappa': meta.get('kappa'),
            'eta': meta.get('eta'),
            'alpha': meta.get('alpha'),
            'rate_kind': point.rate_kind,
            'first_kick': first,
            'last_kick': last,
            'D': point.estimate.value,
            'D_stderr': point.estimate.stderr,
            'classical_D': point.classical_reference,
            'n_trajectories': meta.get('n_trajectories'),
            'seed': meta.get('seed'),
        })
    return rows


def emit_table(frame: pd.DataFrame) -> bytes:
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, lineterminator='\n')
    return buffer.getvalue().encode('utf-8')


def _csv_bytes(rows, columns):
    return emit_table(pd.DataFrame(rows, columns=columns))


def _json_bytes(payload):
    return orjson.dumps(payload, option=orjson.OPT_INDENT_2 | orjson.OPT_SERIALIZE_NUMPY)


def _check_format(fmt):
    if fmt not in FORMATS:
        raise ConfigError('format', f"format '{fmt}' inconnu (csv ou json)")


def emit_records(rows, columns, fmt='csv', metadata=None) -> bytes:
    """Lignes -> CSV aux colonnes données, ou JSON {metadata, points}"""
    _check_format(fmt)
    if fmt == 'csv':
        return _csv_bytes(rows, columns)
    return _json_bytes({'metadata': metadata or {}, 'points': list(rows)})


def emit_curve(curve: DiffusionCurve, fmt='csv') -> bytes:
    return emit_records(curve_rows(curve), CSV_COLUMNS, fmt, curve.metadata)


def parse_curve_json(payload: bytes) -> DiffusionCurve:
    """Relit une courbe émise en JSON"""
    serializer = DiffusionCurveSerializer(data=orjson.loads(payload))
    serializer.is_valid(raise_exception=True)
    return serializer.save()


def parse_curve_csv(payload: bytes, metadata=None) -> DiffusionCurve:
    """Relit une courbe émise en CSV (les métadonnées complètes sont dans le .run.json)"""
    frame = pd.read_csv(io.BytesIO(payload))
    rows = frame.astype(object).where(frame.notna(), None).to_dict(orient='records')
    serializer = CurvePointSerializer(data=rows, many=True)
    serializer.is_valid(raise_exception=True)
    points = tuple(CurvePointSerializer().create(row) for row in serializer.validated_data)
    return DiffusionCurve(points, dict(metadata or {}))


def emit_dinf_report(report, fmt='csv') -> bytes:
    rows = [dict(row) for row in DinfComparisonSerializer(report.rows, many=True).data]
    return emit_records(rows, DINF_COLUMNS, fmt, report.metadata)


def emit_histogram(histogram: MomentumHistogram) -> bytes:
    """Distribution finale moyennée : une ligne par intervalle non vide"""
    occupied = histogram.probabilities > 0
    frame = pd.DataFrame({
        'rho': histogram.momenta[occupied],
        'probability': histogram.probabilities[occupied],
    })
    return emit_table(frame)


def write_output(path, payload: bytes):
    """Écrit le fichier ; toute erreur d'E/S devient une OutputError portant le chemin"""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(payload)
    except OSError as error:
        raise OutputError(str(path), error.strerror or str(error))
    logger.info(f"Résultats écrits dans {path} ({len(payload)} octets)")
    return path


def sidecar_path(path):
    path = Path(path)
    return path.with_name(path.name + '.run.json')


def write_run_record(path, command, config, extra=None):
    """Fichier <out>.run.json : de quoi régénérer la sortie à l'identique"""
    record = {'command': command, 'config': config}
    record.update(extra or {})
    return write_output(sidecar_path(path), _json_bytes(record))
