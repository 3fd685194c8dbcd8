"""quizforge: randomized Moodle CLOZE question banks from declarative templates."""

__version__ = "0.1.0"
