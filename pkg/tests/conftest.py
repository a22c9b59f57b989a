import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from anlessini.docstore import DocLog
from anlessini.docstore import make_app as make_docstore_app
from anlessini.docstore.client import DocStoreClient
from anlessini.hosting import ServerHandle
from anlessini.objstore import BlobStore, ObjectStoreClient
from anlessini.objstore import make_app as make_objstore_app


@pytest.fixture
def blob_store(tmp_path):
    return BlobStore(tmp_path / "objects")


@pytest.fixture
def object_store(blob_store):
    """(store, server, client) with a real HTTP boundary."""
    server = ServerHandle(make_objstore_app(blob_store)).start()
    client = ObjectStoreClient(server.base_url)
    yield blob_store, server, client
    client.close()
    server.stop()


@pytest.fixture
def doc_store(tmp_path):
    """(log, server, client) with a real HTTP boundary."""
    log = DocLog(tmp_path / "docs.jsonl")
    server = ServerHandle(make_docstore_app(log)).start()
    client = DocStoreClient(server.base_url)
    yield log, server, client
    client.close()
    server.stop()
    log.close()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    # surface the acceptance verdict lines even with output capturing on
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "CRITERIA_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
