import pytest
from pydantic import ValidationError

from src.utils.schemas import CommandRecord, NonelementarityReport, RunConfig


def test_run_config_normalizes_format():
    assert RunConfig(output_format=" Structured ").output_format == "structured"
    with pytest.raises(ValidationError):
        RunConfig(output_format="yaml")
    with pytest.raises(ValidationError):
        RunConfig(depth=-1)


def test_nonelementarity_report_counts_components():
    report = NonelementarityReport(bound=3, witness="-1/32768", fiber_size=4, complement_components=5)
    assert report.complement_components == 5
    with pytest.raises(ValidationError):
        NonelementarityReport(bound=3, witness="-1/32768", fiber_size=4, complement_components=4)


def test_command_record_defaults():
    record = CommandRecord(command="rho")
    assert record.schema_version == 1 and record.result is None and record.evidence == {}
