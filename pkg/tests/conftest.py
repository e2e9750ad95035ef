import pytest

from travelscout.corpus import load_manifest, partition

# collected by the acceptance suite's criterion() helper; echoed in the
# terminal summary so the pass/fail lines survive pytest's output capture
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
from travelscout.evaluation import build_reference_frequency
from travelscout.synth import SynthConfig, generate_corpus


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """A quick synthetic corpus shared by pipeline-level tests."""
    cfg = SynthConfig(docs_per_class=30, doc_tokens=300, vocab_size=200,
                      candidates=60, planted_positives=12, century=17, seed=1)
    outdir = tmp_path_factory.mktemp("smallcorpus")
    manifest = generate_corpus(outdir, cfg)
    return outdir, manifest, cfg


@pytest.fixture(scope="session")
def small_partition(small_corpus):
    _, manifest, cfg = small_corpus
    return partition(load_manifest(manifest), cfg.century)


@pytest.fixture(scope="session")
def small_freq(small_partition):
    return build_reference_frequency(small_partition)
