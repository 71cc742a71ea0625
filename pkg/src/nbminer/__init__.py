"""Itemset mining against a negative-binomial random-co-occurrence baseline."""

__version__ = "0.1.0"

from .baselines import (
    FrequentItemset,
    all_confidence,
    confidence,
    mine_allconf,
    mine_frequent,
)
from .evaluation import (
    EvalReport,
    SweepEntry,
    allconf_runs,
    nb_runs,
    positives_closure,
    read_sweep,
    score,
    support_runs,
    sweep,
    write_sweep,
)
from .mining import (
    MinedItemset,
    MinerConfig,
    Selection,
    find_threshold,
    nb_dfs,
    nb_gen,
    nb_select,
    predicted_precision,
    read_itemsets,
    write_itemsets,
)
from .nbmodel import (
    ConvergenceError,
    FreqHistogram,
    GofResult,
    NBParams,
    UnderdispersedError,
    expected_frequent_items,
    fit_database,
    fit_em,
    fit_moments,
    gof_chi2,
    nb_pmf,
    nb_pmf_prefix,
    nb_tail,
    read_model,
    rescale_for_itemset,
    rescale_per_incidence,
    trim_top,
    write_model,
)
from .synthgen import (
    PRESETS,
    GenConfig,
    GroundTruth,
    generate,
    preset_config,
    read_truth,
    write_truth,
)
from .transactions import (
    BasketFormatError,
    ExtensionCounts,
    TransactionDatabase,
    extension_counts,
    load_basket,
    project,
    support,
    write_basket,
)
