"""Binary model files.

Layout: magic, format version, JSON header (family, feature config, hash
function id, frequency-table fingerprint, scalar params, blob directory),
raw little-endian parameter blobs, trailing SHA-256 over everything before
it.  Files are self-describing and refuse to load when truncated, when the
format version is unknown, or when the hash function does not match the one
this build vectorizes with.
"""

import hashlib
import json
import struct
from pathlib import Path

import numpy as np

from ..errors import ChecksumMismatch, ProfileMismatch, VersionMismatch
from ..features import HASH_FUNCTION_ID, FeatureConfig
from .base import TrainConfig
from .linear import LinearSGDClassifier
from .mlp import MLPClassifier
from .naive_bayes import MultinomialNaiveBayes

MAGIC = b"TSCM"
FORMAT_VERSION = 1

_DTYPES = {"f4": "<f4", "f8": "<f8"}


def _collect(model):
    """Return (scalar params, ordered {name: (dtype, array)}) per family."""
    if isinstance(model, MultinomialNaiveBayes):
        params = {"alpha": model.alpha, "dim": model.dim_}
        # counts stay float64: posteriors must survive a round trip to 1e-9
        blobs = {
            "class_counts": ("f8", model.class_counts_),
            "log_prior": ("f8", model.log_prior_),
        }
    elif isinstance(model, LinearSGDClassifier):
        params = {"loss": model.loss, "dim": model.dim_, "bias": model.b_,
                  "train": model.config.to_dict()}
        blobs = {"weights": ("f4", model.w_)}
    elif isinstance(model, MLPClassifier):
        params = {"dim": model.dim_, "bias2": model.b2_,
                  "train": model.config.to_dict()}
        blobs = {"w1": ("f4", model.w1_), "b1": ("f4", model.b1_),
                 "w2": ("f4", model.w2_)}
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    return params, blobs


def model_to_bytes(model) -> bytes:
    params, blobs = _collect(model)
    header = {
        "family": model.family,
        "hash_function": HASH_FUNCTION_ID,
        "feature_config": model.feature_config.to_dict() if model.feature_config else None,
        "freq_fingerprint": model.freq_fingerprint,
        "threshold": model.threshold,
        "params": params,
        "blobs": [{"name": n, "dtype": d, "shape": list(a.shape)}
                  for n, (d, a) in blobs.items()],
    }
    head = json.dumps(header, sort_keys=True).encode("utf-8")
    out = bytearray()
    out += MAGIC
    out += struct.pack("<HI", FORMAT_VERSION, len(head))
    out += head
    for _, (dtype, arr) in blobs.items():
        out += np.ascontiguousarray(arr, dtype=_DTYPES[dtype]).tobytes()
    out += hashlib.sha256(bytes(out)).digest()
    return bytes(out)


def save_model(model, path) -> str:
    """Write the model file; returns its fingerprint (checksum prefix)."""
    data = model_to_bytes(model)
    Path(path).write_bytes(data)
    return data[-32:].hex()[:16]


def model_fingerprint(model) -> str:
    return model_to_bytes(model)[-32:].hex()[:16]


def model_from_bytes(data: bytes):
    if len(data) < 42 or data[:4] != MAGIC:
        raise ChecksumMismatch("not a model file")
    body, checksum = data[:-32], data[-32:]
    if hashlib.sha256(body).digest() != checksum:
        raise ChecksumMismatch("model file corrupt or truncated")
    version, head_len = struct.unpack_from("<HI", data, 4)
    if version != FORMAT_VERSION:
        raise VersionMismatch(f"format version {version}, expected {FORMAT_VERSION}")
    header = json.loads(data[10:10 + head_len].decode("utf-8"))
    if header["hash_function"] != HASH_FUNCTION_ID:
        raise ProfileMismatch(
            f"model hashed with {header['hash_function']!r}, "
            f"this build uses {HASH_FUNCTION_ID!r}")

    arrays = {}
    pos = 10 + head_len
    for spec in header["blobs"]:
        dtype = np.dtype(_DTYPES[spec["dtype"]])
        count = int(np.prod(spec["shape"])) if spec["shape"] else 1
        arr = np.frombuffer(body, dtype=dtype, count=count, offset=pos)
        arrays[spec["name"]] = arr.reshape(spec["shape"]).copy()
        pos += count * dtype.itemsize

    params = header["params"]
    family = header["family"]
    if family == "mnb":
        model = MultinomialNaiveBayes(alpha=params["alpha"])
        model.dim_ = params["dim"]
        model.class_counts_ = arrays["class_counts"]
        model.class_totals_ = model.class_counts_.sum(axis=1)
        model.log_prior_ = arrays["log_prior"]
    elif family in ("svm", "logreg"):
        model = LinearSGDClassifier(loss=params["loss"],
                                    config=TrainConfig.from_dict(params["train"]))
        model.dim_ = params["dim"]
        model.w_ = arrays["weights"]
        model.b_ = params["bias"]
    elif family == "mlp":
        model = MLPClassifier(config=TrainConfig.from_dict(params["train"]))
        model.dim_ = params["dim"]
        model.w1_ = arrays["w1"]
        model.b1_ = arrays["b1"]
        model.w2_ = arrays["w2"]
        model.b2_ = params["bias2"]
    else:
        raise VersionMismatch(f"unknown model family {family!r}")

    model.threshold = header.get("threshold", 0.5)
    model.freq_fingerprint = header.get("freq_fingerprint", "")
    if header.get("feature_config"):
        model.feature_config = FeatureConfig.from_dict(header["feature_config"])
    return model


def load_model(path):
    return model_from_bytes(Path(path).read_bytes())
