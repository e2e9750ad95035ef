"""travelscout: find a target genre in large OCR'd historical corpora.

Pipeline: manifest ingestion and century partitioning, tokenization and
min-frequency filtering, hashed unigram+bigram features, four classifier
families, a stratified split + five-fold CV evaluation protocol, ranked
candidate discovery, and a human review loop that feeds verdicts back
into the ground truth.
"""

__version__ = "0.1.0"

from . import corpus, curve, discover, evaluation, features, models, textprep
from .errors import TravelscoutError

__all__ = ["corpus", "curve", "discover", "evaluation", "features", "models",
           "textprep", "TravelscoutError", "__version__"]
