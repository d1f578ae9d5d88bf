"""Bottom-up syllable recognition from articulatory attribute posteriors.

The pieces, in data-flow order: an attribute inventory (six categories of
speech attributes plus knowledge sources that select subsets of them),
pronunciation lexicons mapping syllables to attribute-tuple sequences
(with bundled Mandarin and Japanese seeds), posterior stream I/O, a
trie-constrained CTC beam decoder with optional n-gram shallow fusion,
error-rate metrics (syllable, homonym-class, and attribute level), and a
synthetic posterior harness for controlled experiments.
"""

__version__ = "0.1.0"

from .decoder import (
    DecodeContext,
    Hypothesis,
    IntegratedFrames,
    NBestList,
    beam_decode,
    build_decode_context,
    decode_attribute_sequence,
    decode_corpus,
    integrate_streams,
    rescore_nbest,
)
from .errors import (
    AttrasrError,
    DecodeFailure,
    FormatError,
    InventoryError,
    LexiconError,
)
from .inventory import (
    ALL_CATEGORIES,
    AttributeTuple,
    Category,
    KnowledgeSource,
    parse_category,
    parse_knowledge_source,
)
from .lexicon import (
    HomonymClassIndex,
    Lexicon,
    LexiconEntry,
    attributes_to_syllables,
    build_homonym_index,
    dump_lexicon,
    load_lexicon,
    load_seed_lexicon,
    project_syllable,
    syllable_to_attributes,
)
from .lm import (
    LmAutomaton,
    NGramModel,
    build_automaton,
    parse_arpa,
    perplexity,
    serialize_arpa,
    train_ngram,
)
from .metrics import (
    Alignment,
    MetricResult,
    ScoreReport,
    edit_distance,
    prer,
    prer_from_attributes,
    read_corpus,
    ser,
    sher,
    write_corpus,
)
from .posteriors import (
    CategoryStream,
    PosteriorSet,
    class_labels,
    read_posteriors,
    write_posteriors,
)
from .synth import (
    ExperimentReport,
    SynthConfig,
    run_experiment,
    sample_corpus,
    synthesize,
)

__all__ = [name for name in dir() if not name.startswith("_")]
