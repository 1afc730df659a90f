import math

import numpy as np
import pandas as pd
import pytest

from anisopush.exceptions import RecordFormatError
from anisopush.analysis.frames import from_iof
from anisopush.collection.records import (RECORD_COLUMNS, CycleRecord, records_to_frame, write_records,
                                          read_records, iter_batches, after_burn_in)


def sample_record(k=0, batch=0) -> CycleRecord:
    initial = (0.01, -0.02, math.radians(30.0 + k))
    pushed = (0.03, 0.05, math.radians(52.5 + k))
    post = (0.001, 0.002, math.radians(40.0 + k))
    return CycleRecord.from_poses(batch, k, initial, pushed, post)


def test_deltas_consistent_with_world_poses():
    record = sample_record()
    delta = np.array([record.dx, record.dy, math.radians(record.dtheta_deg)])
    np.testing.assert_allclose(from_iof(delta, record.initial_pose), (0.03, 0.05, math.radians(52.5)),
                               atol=1e-9)
    assert record.dtheta_deg == pytest.approx(22.5)
    assert record.next_theta0_increment_deg == pytest.approx(10.0)


def test_frame_schema():
    frame = records_to_frame([sample_record(k) for k in range(3)])
    assert list(frame.columns) == RECORD_COLUMNS
    assert frame['k'].dtype == 'int64'
    assert frame.loc[2].tolist() == pytest.approx(sample_record(2).row())


def test_write_and_read(tmp_path):
    records = [sample_record(k, batch) for batch in range(2) for k in range(3)]
    path = write_records(records, tmp_path / 'sub' / 'records.csv')
    frame = read_records(path)
    assert len(frame) == 6
    pd.testing.assert_frame_equal(frame, records_to_frame(records))


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        read_records(tmp_path / 'nope.csv')


def test_empty_file(tmp_path):
    path = tmp_path / 'records.csv'
    path.write_text('')
    with pytest.raises(RecordFormatError):
        read_records(path)
    path.write_text(','.join(RECORD_COLUMNS) + '\n')
    with pytest.raises(RecordFormatError):
        read_records(path)


def test_missing_column(tmp_path):
    frame = records_to_frame([sample_record()]).drop(columns=['dy'])
    path = tmp_path / 'records.csv'
    frame.to_csv(path, index=False)
    with pytest.raises(RecordFormatError) as info:
        read_records(path)
    assert info.value.column == 'dy'


def test_bad_cell_names_row_and_column(tmp_path):
    frame = records_to_frame([sample_record(k) for k in range(3)]).astype({'dx': object})
    frame.loc[2, 'dx'] = 'abc'
    path = tmp_path / 'records.csv'
    frame.to_csv(path, index=False)
    with pytest.raises(RecordFormatError) as info:
        read_records(path)
    assert info.value.row == 3
    assert info.value.column == 'dx'
    assert 'row 3' in str(info.value)


def test_fractional_cycle_index_rejected(tmp_path):
    frame = records_to_frame([sample_record()]).astype({'k': float})
    frame.loc[0, 'k'] = 1.5
    path = tmp_path / 'records.csv'
    frame.to_csv(path, index=False)
    with pytest.raises(RecordFormatError) as info:
        read_records(path)
    assert info.value.column == 'k'


def test_batches_and_burn_in():
    records = [sample_record(k, batch) for batch in (1, 0) for k in (2, 0, 1)]
    frame = records_to_frame(records)
    batches = list(iter_batches(frame))
    assert [b for b, _ in batches] == [0, 1]
    assert list(batches[0][1]['k']) == [0, 1, 2]
    assert list(after_burn_in(frame, 2)['k']) == [2, 2]
