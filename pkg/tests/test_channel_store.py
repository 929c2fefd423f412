import json

import numpy as np
import pytest

from qftverify.exceptions import InvalidChannelError, ReportIOError
from qftverify.services.channel import channels_equal
from qftverify.services.channel_store import (
    CHANNEL_FORMAT,
    dumps_channel,
    load_channel,
    loads_channel,
    save_channel,
)


def test_round_trip_is_bit_exact(make_channel, tmp_path):
    c = make_channel("mixed_unitary", n=3, eps=0.4, seed=9, terms=3)
    path = save_channel(c, tmp_path / "nested" / "mixture.json")
    loaded = load_channel(path)
    assert np.array_equal(loaded.kraus_ops, c.kraus_ops)
    assert channels_equal(loaded, c)


def test_document_header(make_channel):
    doc = json.loads(dumps_channel(make_channel("depolarized", n=2, p=0.1)))
    assert doc["format"] == CHANNEL_FORMAT
    assert doc["version"] == 1
    assert doc["dim"] == 4
    assert doc["rank"] == len(doc["kraus"])


def test_rejects_foreign_documents(make_channel):
    doc = json.loads(dumps_channel(make_channel("exact", n=1)))
    with pytest.raises(InvalidChannelError):
        loads_channel(json.dumps({**doc, "version": 2}))
    with pytest.raises(InvalidChannelError):
        loads_channel(json.dumps({**doc, "format": "something-else"}))
    with pytest.raises(InvalidChannelError):
        loads_channel(json.dumps({**doc, "rank": 3}))
    with pytest.raises(InvalidChannelError):
        loads_channel("[1, 2")


def test_missing_file(tmp_path):
    with pytest.raises(ReportIOError):
        load_channel(tmp_path / "absent.json")
