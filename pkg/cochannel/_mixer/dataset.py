""" cochannel: co-channel speech detection toolkit

    Dataset planning (speaker partition, per-mixture specs) and rendering.

    Licensed under the GNU Lesser General Public License v2.1 or later.
"""

import enum
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, FrozenSet, Iterator, List, Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .corpus import Corpus, Gender, Utterance
from .mixing import LabeledMixture, MixtureSpec, mix_at_offset, speaker_of
from .._audio import AudioClip, FrameGrid, PathType, write_wav
from .._exceptions import CapacityError, DataError, DegenerateSourceError, ParameterError
from .._logger import QuietLogger, log
from .._protocol.labels import write_labels
from .._utils.seeds import derive_seed, make_rng
from ..const import (
    _MIN_SPEAKERS,
    _SAMPLE_RATE,
    _SIR_RANGE_DB,
    _SPLITS,
    _SPLIT_DEV,
    _SPLIT_TEST,
    _SPLIT_TRAIN,
    _TEST_SPEAKER_FRACTION,
    _VAD_THRESHOLD_DB,
)

# Fresh offsets tried when a planned overlap lands in digital silence.
_OFFSET_REDRAWS = 8


@enum.unique
class Pairing(enum.Enum):
    Any = 'any'
    MaleMale = 'male-male'
    FemaleFemale = 'female-female'
    MaleFemale = 'male-female'


class ManifestEntry(NamedTuple):
    mix_path: str
    label_path: str
    split: str
    spec: MixtureSpec
    rescale_factor: Optional[float] = None


class DatasetManifest:

    """Planned (or rendered) mixtures plus the speaker partition they were drawn from.

    Paths in entries are relative to the dataset directory.
    """

    def __init__(
        self, entries: Sequence[ManifestEntry], speaker_partition: Mapping[str, FrozenSet[str]]
    ) -> None:
        self.entries: List[ManifestEntry] = list(entries)
        self.speaker_partition: Dict[str, FrozenSet[str]] = {
            split: frozenset(speaker_partition.get(split, ())) for split in _SPLITS
        }

    def __repr__(self) -> str:
        return '<DatasetManifest:{%s}>' % ', '.join(
            '%s=%d' % (split, len(self.entries_for(split))) for split in _SPLITS
        )

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[ManifestEntry]:
        return iter(self.entries)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, DatasetManifest)
            and self.entries == other.entries
            and self.speaker_partition == other.speaker_partition
        )

    def entries_for(self, split: str) -> List[ManifestEntry]:
        return [entry for entry in self.entries if entry.split == split]

    def validate(self) -> None:
        """Check speaker disjointness and that every entry stays inside its split."""
        test = self.speaker_partition[_SPLIT_TEST]
        seen = self.speaker_partition[_SPLIT_TRAIN] | self.speaker_partition[_SPLIT_DEV]
        if test & seen:
            raise DataError("Test speakers %s also appear in train/dev" % sorted(test & seen))
        for entry in self.entries:
            speakers = self.speaker_partition.get(entry.split)
            if speakers is None:
                raise DataError("Unknown split %r in %s" % (entry.split, entry.mix_path))
            for key in (entry.spec.target_utterance, entry.spec.interferer_utterance):
                if speaker_of(key) not in speakers:
                    raise DataError(
                        "%s uses %s outside the %s speaker set" % (entry.mix_path, key, entry.split)
                    )


def _eligible_genders(pairing: Pairing) -> Tuple[Gender, ...]:
    if pairing is Pairing.MaleMale:
        return (Gender.Male,)
    if pairing is Pairing.FemaleFemale:
        return (Gender.Female,)
    if pairing is Pairing.MaleFemale:
        return (Gender.Male, Gender.Female)
    return (Gender.Male, Gender.Female, Gender.Unknown)


def partition_speakers(
    corpus: Corpus, seed: int, pairing: Pairing = Pairing.Any
) -> Dict[str, FrozenSet[str]]:
    """Split the eligible speakers into a test set and a shared train/dev set.

    Speakers are shuffled per gender and interleaved, so the test set takes
    both genders whenever the corpus has them.
    """
    rng = make_rng(seed, 'partition')
    if pairing is not Pairing.Any:
        ungendered = sorted(name for name, tag in corpus.genders.items() if tag is Gender.Unknown)
        if ungendered:
            QuietLogger.log_warning_once(
                'Pairing %s leaves out %d speakers without a gender', pairing.value, len(ungendered)
            )
    groups: Dict[Gender, List[str]] = {}
    for gender in _eligible_genders(pairing):
        members = sorted(name for name, tag in corpus.genders.items() if tag is gender)
        groups[gender] = [members[i] for i in rng.permutation(len(members))]

    if pairing is Pairing.MaleFemale:
        for gender, members in groups.items():
            if len(members) < 2:
                raise CapacityError(
                    "Pairing %s needs at least 2 %s speakers, corpus has %d"
                    % (pairing.value, gender.value, len(members))
                )
        test = []
        for members in groups.values():
            n_test = min(max(1, round(len(members) * _TEST_SPEAKER_FRACTION)), len(members) - 1)
            test.extend(members[:n_test])
        rest = [name for members in groups.values() for name in members if name not in test]
    else:
        interleaved = []
        longest = max((len(members) for members in groups.values()), default=0)
        for position in range(longest):
            interleaved.extend(members[position] for members in groups.values() if position < len(members))
        if len(interleaved) < _MIN_SPEAKERS:
            raise CapacityError(
                "Pairing %s needs at least %d speakers, corpus has %d eligible"
                % (pairing.value, _MIN_SPEAKERS, len(interleaved))
            )
        n_test = min(max(2, round(len(interleaved) * _TEST_SPEAKER_FRACTION)), len(interleaved) - 2)
        test, rest = interleaved[:n_test], interleaved[n_test:]

    log.debug('Speaker partition: test=%s train/dev=%s', sorted(test), sorted(rest))
    return {_SPLIT_TRAIN: frozenset(rest), _SPLIT_DEV: frozenset(rest), _SPLIT_TEST: frozenset(test)}


def _compatible(target: Gender, interferer: Gender, pairing: Pairing) -> bool:
    if pairing is Pairing.MaleFemale:
        return target is not interferer
    return True


def draw_spec(target: Utterance, interferers: Sequence[Utterance], seed: int) -> MixtureSpec:
    """Draw SIR ~ U[0, 5] dB, an offset inside the target and an interferer, all from ``seed``."""
    if not interferers:
        raise CapacityError("No interferer available for %s" % target.key)
    rng = np.random.default_rng(seed)
    low, high = _SIR_RANGE_DB
    sir_db = float(rng.uniform(low, high))
    offset = int(rng.integers(0, max(target.num_samples, 1)))
    interferer = interferers[int(rng.integers(0, len(interferers)))]
    return MixtureSpec(target.key, interferer.key, sir_db, offset, seed)


def _mixture_path(split: str, index: int) -> str:
    return 'mixtures/%s/%06d.wav' % (split, index)


def _label_path(split: str, index: int) -> str:
    return 'labels/%s/%06d.lab' % (split, index)


def generate_dataset(
    corpus: Corpus,
    seconds: Mapping[str, float],
    seed: int,
    pairing: Pairing = Pairing.Any,
) -> DatasetManifest:
    """Plan one mixture per target utterance until each split reaches its duration.

    ``seconds`` maps split names to the requested mixture duration. Train and
    dev draw targets from one shuffled queue over their shared speakers, so no
    target utterance is used twice. Every random choice for entry ``i`` comes
    from ``derive_seed(seed, 'mixture', i)``, which makes the plan independent
    of worker scheduling.
    """
    for split, amount in seconds.items():
        if split not in _SPLITS:
            raise ParameterError("Unknown split %r" % split)
        if amount < 0:
            raise ParameterError("Split %s has a negative duration %s" % (split, amount))
    partition = partition_speakers(corpus, seed, pairing)

    queues: Dict[str, List[Utterance]] = {}
    for split in (_SPLIT_TRAIN, _SPLIT_TEST):
        pool = [utt for utt in corpus if utt.speaker in partition[split] and utt.num_samples > 0]
        order = make_rng(seed, 'targets', split).permutation(len(pool))
        queues[split] = [pool[i] for i in order]
    queues[_SPLIT_DEV] = queues[_SPLIT_TRAIN]

    entries: List[ManifestEntry] = []
    for split in _SPLITS:
        budget = float(seconds.get(split, 0.0))
        speakers = partition[split]
        candidates = [utt for utt in corpus if utt.speaker in speakers]
        planned = 0.0
        count = 0
        queue = queues[split]
        while planned < budget:
            if not queue:
                available = sum(utt.num_samples for utt in candidates) / _SAMPLE_RATE
                raise CapacityError(
                    "Split %s needs %.1f s of mixtures but only %.1f s were planned: %d speakers with "
                    "%.1f s of audio (%d utterances) are exhausted"
                    % (split, budget, planned, len(speakers), available, len(candidates))
                )
            target = queue.pop(0)
            target_gender = corpus.genders[target.speaker]
            interferers = [
                utt
                for utt in candidates
                if utt.speaker != target.speaker
                and _compatible(target_gender, corpus.genders[utt.speaker], pairing)
            ]
            index = len(entries)
            spec = draw_spec(target, interferers, derive_seed(seed, 'mixture', index))
            interferer = corpus.utterance(spec.interferer_utterance)
            length = max(target.num_samples, spec.offset_samples + interferer.num_samples)
            planned += length / _SAMPLE_RATE
            count += 1
            entries.append(ManifestEntry(_mixture_path(split, index), _label_path(split, index), split, spec))
        log.info('Planned %s split: %d mixtures, %.1f s', split, count, planned)

    manifest = DatasetManifest(entries, partition)
    manifest.validate()
    return manifest


def redraw_offset(spec: MixtureSpec, target: AudioClip, attempt: int) -> MixtureSpec:
    """Move the overlap start onto a nonzero target sample, drawn from the mixture's own seed."""
    voiced = np.flatnonzero(target.samples)
    if not len(voiced):
        raise DegenerateSourceError("Target %s is digital silence" % spec.target_utterance)
    rng = make_rng(spec.seed, 'offset', attempt)
    return spec._replace(offset_samples=int(voiced[rng.integers(0, len(voiced))]))


def _mix_with_redraws(
    spec: MixtureSpec, target: AudioClip, interferer: AudioClip, grid: FrameGrid, vad_threshold_db: float
) -> Tuple[MixtureSpec, LabeledMixture]:
    attempt = 0
    while True:
        try:
            return spec, mix_at_offset(target, interferer, spec, grid, vad_threshold_db)
        except DegenerateSourceError:
            if attempt == _OFFSET_REDRAWS:
                raise
        planned = spec.offset_samples
        spec = redraw_offset(spec, target, attempt)
        attempt += 1
        log.debug(
            'Silent overlap for %s at offset %d, retrying at %d',
            spec.target_utterance,
            planned,
            spec.offset_samples,
        )


def _render_entry(
    entry: ManifestEntry, corpus: Corpus, out_dir: Path, grid: FrameGrid, vad_threshold_db: float
) -> ManifestEntry:
    target = corpus.load(entry.spec.target_utterance)
    interferer = corpus.load(entry.spec.interferer_utterance)
    spec, mixture = _mix_with_redraws(entry.spec, target, interferer, grid, vad_threshold_db)
    mix_path = out_dir / entry.mix_path
    label_path = out_dir / entry.label_path
    mix_path.parent.mkdir(parents=True, exist_ok=True)
    label_path.parent.mkdir(parents=True, exist_ok=True)
    write_wav(mixture.clip, mix_path)
    write_labels(mixture.frame_labels, label_path)
    return entry._replace(spec=spec, rescale_factor=mixture.rescale_factor)


def render_dataset(
    manifest: DatasetManifest,
    corpus: Corpus,
    out_dir: PathType,
    workers: Optional[int] = None,
    grid: Optional[FrameGrid] = None,
    vad_threshold_db: float = _VAD_THRESHOLD_DB,
) -> DatasetManifest:
    """Mix every planned entry to disk and return the manifest with rescale factors filled in.

    Entries are rendered on a thread pool; results are collected in manifest
    order. A mixture whose overlap lands in digital silence is retried at
    offsets drawn by :func:`redraw_offset`, and the returned entry records the
    offset actually used. Per-file failures are logged once per message and reported
    together as a :class:`DataError` after all other files are written.
    """
    out_dir = Path(out_dir)
    grid = grid or FrameGrid()
    rendered: List[ManifestEntry] = []
    failures = []
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = [
            executor.submit(_render_entry, entry, corpus, out_dir, grid, vad_threshold_db)
            for entry in manifest.entries
        ]
        for entry, future in zip(manifest.entries, futures):
            try:
                rendered.append(future.result())
            except (DataError, OSError) as exc:
                QuietLogger.log_exception_once(exc, 'Failed to render %s: %s', entry.mix_path, exc)
                failures.append(entry.mix_path)
                rendered.append(entry)
    if failures:
        raise DataError(
            "%d of %d mixtures failed to render, first: %s" % (len(failures), len(rendered), failures[0])
        )
    log.info('Rendered %d mixtures into %s', len(rendered), out_dir)
    return DatasetManifest(rendered, manifest.speaker_partition)
