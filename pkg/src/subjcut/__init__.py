"""Sentiment polarity classification on subjectivity extracts.

Reviews are first filtered sentence by sentence: a detector trained on a
separate subjective/objective sentence corpus scores each sentence, and a
minimum-cut partition over a source/sink graph (optionally with proximity
edges between nearby sentences) decides which sentences to keep. A standard
polarity classifier is then trained and evaluated on the extracts under
ten-fold cross-validation.
"""

from .classifiers import (
    DegenerateModelError,
    IndividualScores,
    LinearMarginModel,
    NaiveBayesModel,
    TrainingError,
    VocabularyMismatchError,
    load_model,
    nb_predict_prob,
    nb_train,
    save_model,
    svm_decision,
    svm_to_individual,
    svm_train,
)
from .corpus import (
    ConfigurationError,
    CorpusManifest,
    IngestionError,
    LabeledSentence,
    ReviewDocument,
    assign_folds,
    build_manifest,
    detect_paragraphs,
    load_polarity_dataset,
    load_subjectivity_dataset,
    tokenize,
)
from .evaluation import (
    ExperimentConfig,
    ExperimentReport,
    FoldResult,
    GridSearchResult,
    GridSpec,
    ParagraphComparison,
    TTestResult,
    add_comparison,
    detector_cv_accuracies,
    grid_search,
    make_detector,
    make_extracts,
    n_sentence_sweep,
    paired_t_test,
    paragraph_comparison,
    run_experiment,
    score_documents,
    train_detector_model,
)
from .extraction import (
    Detector,
    DetectorConfig,
    Extract,
    ProximityParams,
    assoc_scores,
    build_extract,
    detect_basic,
    detect_graph,
    detect_paragraph_unit,
    extract_first_n,
    extract_last_n,
    extract_least_n,
    extract_objective,
    extract_top_n,
    individual_scores,
    preservation_rate,
    select_basic,
    select_graph,
)
from .features import (
    EmptyVocabularyError,
    PresenceVector,
    Vocabulary,
    build_vocabulary,
    featurize,
)
from .mincut import (
    AssociationScores,
    CutResult,
    FlowNetwork,
    brute_force_min,
    build_network,
    min_cut,
    partition_cost,
    scale_instance,
)

__version__ = "0.1.0"
