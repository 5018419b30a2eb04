import json
import pathlib

import pytest

from qnakit.corpus import Document, GoldAnswer, QAExample, _paragraph_from_text

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


def load_qa_fixture():
    """The bundled 50-item overfit set as (documents, examples)."""
    items = json.loads((FIXTURES / "qa_overfit.json").read_text())
    docs, examples = [], []
    for i, it in enumerate(items):
        paras = [_paragraph_from_text(c, f"d{i}-p{j}") for j, c in enumerate(it["context"])]
        docs.append(Document(f"d{i}", paras))
        if it["answer"] is None:
            examples.append(QAExample(it["question"], f"d{i}", [], False, f"q{i}"))
        else:
            p = paras[it["para"]]
            k = p.tokens.index(it["answer"])
            gold = GoldAnswer(it["para"], k, k, it["answer"])
            examples.append(QAExample(it["question"], f"d{i}", [gold], True, f"q{i}"))
    return docs, examples


@pytest.fixture(scope="session")
def qa_fixture_data():
    return load_qa_fixture()


@pytest.fixture(scope="session")
def qa_overfit_model(qa_fixture_data):
    """Desk QA model overfit on the bundled fixture (shared across tests)."""
    from qnakit.qa.train import QATrainConfig, qa_model_from_checkpoint, train_qa

    docs, examples = qa_fixture_data
    config = QATrainConfig(k_train=2, epochs=80, learning_rate=1e-3, batch_size=10, seed=3)
    ckpt = train_qa(examples, None, docs, config)
    return qa_model_from_checkpoint(ckpt)


@pytest.fixture(scope="session")
def qg_fixture_examples():
    from qnakit.corpus import load_qg_examples

    return load_qg_examples(str(FIXTURES / "qg_overfit.jsonl"))


@pytest.fixture(scope="session")
def qg_overfit_session(qg_fixture_examples):
    """Desk QG model overfit on the bundled 20-pair fixture."""
    from qnakit.qg.train import (QGTrainConfig, TrainingRegime,
                                 qg_model_from_checkpoint, train_qg)

    config = QGTrainConfig(max_steps=1200, batch_size=10, learning_rate=3e-3,
                           seed=11, num_merges=150)
    ckpt = train_qg(qg_fixture_examples, TrainingRegime.STANDARD, config=config)
    return qg_model_from_checkpoint(ckpt)


@pytest.fixture(scope="session")
def stub_checkpoints(tmp_path_factory):
    """Paths to saved deterministic stub checkpoints (qa, qg)."""
    from qnakit.checkpoint import save_checkpoint
    from qnakit.qa.stub import StubQAModel
    from qnakit.qg.stub import StubQGModel

    d = tmp_path_factory.mktemp("stubs")
    qa_path = d / "qa_stub.ckpt"
    qg_path = d / "qg_stub.ckpt"
    save_checkpoint(str(qa_path), StubQAModel().to_checkpoint())
    save_checkpoint(str(qg_path), StubQGModel().to_checkpoint())
    return str(qa_path), str(qg_path)


# Release-criterion checklist lines, appended by tests/test_acceptance.py and
# echoed after the run (terminal summary runs with output capture suspended).
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
