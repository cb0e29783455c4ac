"""
Tests the validators
"""
import pytest
from jsonschema import ValidationError

from fraudlab.validators import JSONSchemaValidator


@pytest.fixture()
def test_schema():
    return {
        "type": "object",
        "properties": {
            "app_id": {"type": "string"},
            "suspicious": {"type": "boolean"},
        },
        "required": ["app_id", "suspicious"],
    }


def test_jsonschemavalidator(test_schema):
    validator = JSONSchemaValidator(schema=test_schema)
    strict_validator = JSONSchemaValidator(schema=test_schema, strict=True)

    valid_doc = {"app_id": "app_0", "suspicious": True}
    invalid_doc_missing_key = {"app_id": "app_0"}
    invalid_doc_wrong_type = {"app_id": "app_0", "suspicious": "true"}

    assert validator.is_valid(valid_doc)
    assert not validator.is_valid(invalid_doc_missing_key)
    assert not validator.is_valid(invalid_doc_wrong_type)

    with pytest.raises(ValidationError):
        strict_validator.is_valid(invalid_doc_wrong_type)

    assert validator.validation_errors(valid_doc) == []
    assert validator.validation_errors(invalid_doc_missing_key) == [": 'suspicious' is a required property"]
    assert validator.validation_errors(invalid_doc_wrong_type) == ["suspicious: 'true' is not of type 'boolean'"]
