"""Python bindings for the survml survival-classification benchmark."""

from ._core import (
    Dataset,
    EvaluationError,
    LearnerSpec,
    ParameterError,
    ShapeError,
    SurvmlError,
    TrainedModel,
    __version__,
    anova_f,
    confusion,
    cross_validate,
    encode_csv,
    generate_synthetic,
    kfold_indices,
    load_model,
    make_dataset,
    metrics,
    roc_auc,
    roc_curve,
    run_benchmark,
    select_k_best,
    split,
    standardize,
    train,
)

LEARNERS = ("lr", "svm", "dt", "rf", "et", "knn", "ada")
