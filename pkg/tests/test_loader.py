import json

import pytest

from folcheck.diagnostics import ProgramError
from folcheck.loader import parse_program
from folcheck.program import canonicalize
from folcheck.terms import SortKind

from conftest import CORPUS_IDS, corpus_source


def diags_of(source: str):
    with pytest.raises(ProgramError) as excinfo:
        parse_program(source)
    return excinfo.value.diagnostics


@pytest.mark.parametrize("case_id", CORPUS_IDS)
def test_every_corpus_program_parses(case_id):
    program = parse_program(corpus_source(case_id))
    assert program.actions


def test_trace1_section_counts():
    program = parse_program(corpus_source("trace1_sotomayor_giraffe"))
    assert len(program.sorts) == 3
    assert len(program.functions) == 2
    assert len(program.constants) == 2
    assert len(program.knowledge_base) == 2
    assert len(program.verifications) == 1
    assert program.actions == ("verify_conditions",)


def test_empty_document_is_a_valid_empty_program():
    program = parse_program("{}")
    assert program.sorts == ()
    assert program.knowledge_base == ()
    assert program.actions == ()


def test_knowledgebase_alias_accepted():
    program = parse_program(corpus_source("hse2_forklift_pallet"))
    assert len(program.knowledge_base) == 2


def test_kb_object_entry_with_false_value():
    source = corpus_source("hse1_hardhat_harness")
    program = parse_program(source)
    entry = program.knowledge_base[1]
    assert entry.value is False
    assert entry.text == "Wearing(worker, hardHat)"


def test_string_kb_entries_wrap_with_value_absent():
    program = parse_program(corpus_source("hse3_fall_protection"))
    assert program.knowledge_base[0].value is None
    assert program.knowledge_base[0].text == "Worker(worker)"


def test_verify_alias_canonicalizes():
    source = json.dumps({"actions": ["verify"]})
    assert parse_program(source).actions == ("verify_conditions",)


def test_canonicalize_idempotent():
    program = parse_program(corpus_source("hse2_forklift_pallet"))
    assert canonicalize(program) == program
    assert canonicalize(canonicalize(program)) == canonicalize(program)


def test_unknown_action_rejected():
    diags = diags_of(json.dumps({"actions": ["prove"]}))
    assert diags[0].category == "UnknownAction"
    assert diags[0].span.path == "/actions/0"


def test_malformed_json():
    diags = diags_of("{not json")
    assert [d.category for d in diags] == ["JsonSyntax"]


def test_unknown_top_level_key_rejected():
    diags = diags_of(json.dumps({"sortz": []}))
    assert diags[0].category == "SchemaViolation"
    assert "sortz" in diags[0].message


def test_unknown_entry_key_rejected_with_pointer():
    doc = {"sorts": [{"name": "A", "type": "DeclareSort", "extra": 1}]}
    diags = diags_of(json.dumps(doc))
    assert diags[0].category == "SchemaViolation"
    assert diags[0].span.path == "/sorts/0/extra"


def test_enum_requires_values():
    doc = {"sorts": [{"name": "Color", "type": "EnumSort"}]}
    assert diags_of(json.dumps(doc))[0].span.path == "/sorts/0/values"


def test_enum_duplicate_values_rejected():
    doc = {"sorts": [{"name": "Color", "type": "EnumSort", "values": ["red", "red"]}]}
    assert diags_of(json.dumps(doc))[0].category == "DuplicateName"


def test_bitvec_width_accepted():
    doc = {"sorts": [{"name": "Byte", "type": "BitVecSort", "width": 8}]}
    program = parse_program(json.dumps(doc))
    assert program.sorts[0].kind is SortKind.BITVEC
    assert program.sorts[0].width == 8


def test_bitvec_requires_positive_width():
    doc = {"sorts": [{"name": "Byte", "type": "BitVecSort", "width": 0}]}
    assert diags_of(json.dumps(doc))[0].span.path == "/sorts/0/width"


def test_sort_keywords_without_suffix():
    doc = {"sorts": [{"name": "Flag", "type": "Bool"}]}
    assert parse_program(json.dumps(doc)).sorts[0].kind is SortKind.BOOL


def test_rule_requires_exactly_one_body_form():
    doc = {"rules": [{"name": "r", "constraint": "true", "implies": {"antecedent": "a", "consequent": "b"}}]}
    diags = diags_of(json.dumps(doc))
    assert "exactly one" in diags[0].message


def test_exists_binder_rejects_implies_form():
    doc = {
        "verifications": [
            {
                "name": "v",
                "exists": [{"name": "x", "sort": "Int"}],
                "implies": {"antecedent": "x > 0", "consequent": "x > 1"},
            }
        ]
    }
    diags = diags_of(json.dumps(doc))
    assert "exists binder pairs with the constraint form" in diags[0].message


def test_expression_error_carries_path_and_offsets():
    doc = {"verifications": [{"name": "v", "constraint": "Safe(worker"}]}
    diags = diags_of(json.dumps(doc))
    assert diags[0].category == "ExpressionSyntax"
    assert diags[0].span.path == "/verifications/0/constraint"
    assert diags[0].span.start == 11


def test_multiple_errors_collected_in_one_pass():
    doc = {
        "sorts": [{"name": "A", "type": "NoSuchSort"}],
        "knowledge_base": [{"assertion": "f(("}],
        "actions": ["verify_conditions"],
    }
    diags = diags_of(json.dumps(doc))
    categories = {d.category for d in diags}
    assert "UnknownSort" in categories
    assert "ExpressionSyntax" in categories


def test_diagnostics_sorted_by_path():
    doc = {
        "verifications": [
            {"name": "b", "constraint": "x +"},
            {"name": "a", "constraint": "y ("},
        ],
        "knowledge_base": ["(("],
    }
    diags = diags_of(json.dumps(doc))
    paths = [d.span.path for d in diags]
    assert paths == sorted(paths)


def test_parse_is_deterministic():
    source = corpus_source("sat07_fall_protection_height")
    assert parse_program(source) == parse_program(source)
