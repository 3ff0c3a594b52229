""" cochannel: co-channel speech detection toolkit

    Dataset manifests: JSON lines, one record per mixture, with the speaker
    partition in a ``partition.json`` file beside it.

    Record fields, in this order: mix_path, label_path, split, target_key,
    interferer_key, sir_db, offset_samples, seed, rescale_factor.

    Licensed under the GNU Lesser General Public License v2.1 or later.
"""

import json
import os
from typing import Any, Dict

from .._audio import PathType
from .._exceptions import DataError
from .._mixer.dataset import DatasetManifest, ManifestEntry
from .._mixer.mixing import MixtureSpec
from ..const import _SPLITS

PARTITION_FILE = 'partition.json'

_FIELDS = (
    'mix_path',
    'label_path',
    'split',
    'target_key',
    'interferer_key',
    'sir_db',
    'offset_samples',
    'seed',
    'rescale_factor',
)


def entry_to_record(entry: ManifestEntry) -> Dict[str, Any]:
    spec = entry.spec
    values = (
        entry.mix_path,
        entry.label_path,
        entry.split,
        spec.target_utterance,
        spec.interferer_utterance,
        float(spec.sir_db),
        int(spec.offset_samples),
        int(spec.seed),
        None if entry.rescale_factor is None else float(entry.rescale_factor),
    )
    return dict(zip(_FIELDS, values))


def entry_from_record(record: Dict[str, Any]) -> ManifestEntry:
    missing = [field for field in _FIELDS if field not in record]
    if missing:
        raise DataError("Manifest record lacks %s" % ', '.join(missing))
    spec = MixtureSpec(
        str(record['target_key']),
        str(record['interferer_key']),
        float(record['sir_db']),
        int(record['offset_samples']),
        int(record['seed']),
    )
    rescale = record['rescale_factor']
    return ManifestEntry(
        str(record['mix_path']),
        str(record['label_path']),
        str(record['split']),
        spec,
        None if rescale is None else float(rescale),
    )


def partition_path(manifest_path: PathType) -> str:
    return os.path.join(os.path.dirname(os.fspath(manifest_path)), PARTITION_FILE)


def write_manifest(manifest: DatasetManifest, path: PathType) -> None:
    """Write the records and the partition file; equal manifests give identical bytes."""
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        for entry in manifest:
            f.write(json.dumps(entry_to_record(entry)) + '\n')
    partition = {split: sorted(manifest.speaker_partition[split]) for split in _SPLITS}
    with open(partition_path(path), 'w', encoding='utf-8', newline='\n') as f:
        json.dump(partition, f, indent=1)
        f.write('\n')


def read_manifest(path: PathType) -> DatasetManifest:
    entries = []
    with open(path, encoding='utf-8') as f:
        for number, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                entries.append(entry_from_record(json.loads(line)))
            except (ValueError, TypeError, DataError) as exc:
                raise DataError("%s line %d: %s" % (path, number, exc)) from exc
    try:
        with open(partition_path(path), encoding='utf-8') as f:
            partition = json.load(f)
    except FileNotFoundError as exc:
        raise DataError("%s has no %s beside it" % (path, PARTITION_FILE)) from exc
    except ValueError as exc:
        raise DataError("Malformed %s: %s" % (partition_path(path), exc)) from exc
    manifest = DatasetManifest(entries, {split: frozenset(partition.get(split, ())) for split in _SPLITS})
    manifest.validate()
    return manifest
