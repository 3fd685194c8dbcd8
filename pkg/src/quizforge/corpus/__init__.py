"""The fifteen bundled example templates, shipped as package data."""

from __future__ import annotations

import json
from importlib import resources

from ..template import QuizTemplate, load_template

_EXAMPLES = [
    (1, "Mean", "01_mean",
     "Find the mean of a random normal sample; partial credit for not rounding."),
    (2, "Mean and Median", "02_mean_median",
     "Find mean and median, then compare them in a drop-down."),
    (3, "Five Number Summary", "03_five_number_summary",
     "Five-number summary of a rounded Beta sample."),
    (4, "One Categorical Variable", "04_one_categorical",
     "Counts of one categorical variable; find a percentage."),
    (5, "Two Categorical Variables", "05_two_categorical",
     "Two-way counts; find a column percentage."),
    (6, "CI for Mean", "06_ci_mean",
     "t confidence interval with a random confidence level; partial credit "
     "for wrong rounding and wrong level."),
    (7, "CI for Percentage", "07_ci_percentage",
     "Normal-approximation interval from successes and trials."),
    (8, "Hypothesis Testing for Mean", "08_hypothesis_mean",
     "One-sample t-test with LaTeX hypotheses."),
    (9, "Sample Size for Proportion", "09_sample_size",
     "Sample size needed for a percentage interval with given error."),
    (10, "Correlation and Regression", "10_correlation_regression",
     "Correlation coefficient and regression line, with a scatter plot."),
    (11, "Data downloaded from the internet", "11_internet_data",
     "Work with lottery data from a provided link (shown as text only)."),
    (12, "Multiple Stories", "12_multiple_stories",
     "Same percentage problem told through three different stories."),
    (13, "R output", "13_r_output",
     "Read numbers off a rendered one-sample t-test output block."),
    (14, "Pre-calculus: Solving a Linear System", "14_linear_system",
     "Solve a 2x2 linear system with nonzero coefficients from -3..3."),
    (15, "Calculus: Find Derivative and Integral", "15_calculus",
     "Differentiate a power function and evaluate a definite integral."),
]

_BY_ID = {eid: (title, stem, desc) for eid, title, stem, desc in _EXAMPLES}


def list_examples() -> list[dict]:
    """Metadata for all bundled examples, in id order."""
    return [{"id": eid, "title": title, "description": desc}
            for eid, title, stem, desc in _EXAMPLES]


def example_ids() -> list[int]:
    return [eid for eid, *_ in _EXAMPLES]


def load_example_document(example_id: int) -> dict:
    """The raw template document for one example."""
    if example_id not in _BY_ID:
        raise KeyError(example_id)
    stem = _BY_ID[example_id][1]
    path = resources.files("quizforge.corpus") / f"{stem}.quiz.json"
    return json.loads(path.read_text(encoding="utf-8"))


def load_example(example_id: int) -> QuizTemplate:
    return load_template(load_example_document(example_id))
