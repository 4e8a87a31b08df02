import json

import pytest

from unique_sampling import ParseError, ProgramExpander
from unique_sampling.oracle import enumerate_traces
from unique_sampling.programs import MarkovExpander, create_expander, create_program, load_program_spec, parse_program_spec
from unique_sampling.programs.specs import ExplicitSpec, MarkovSpec, ToySpec
from unique_sampling.programs.toy import toy_program


@pytest.mark.parametrize("kind", ["figure3", "toy"])
def test_bundled_program_spec(kind):
    spec = parse_program_spec(json.dumps({"kind": kind}))

    assert isinstance(spec, ToySpec)
    assert create_program(spec) is toy_program
    assert isinstance(create_expander(spec), ProgramExpander)


def test_markov_spec_with_tables():
    spec = parse_program_spec(
        {
            "kind": "markov",
            "vocabulary_size": 2,
            "length": 2,
            "tables": {"": [0.5, 0.5], "0": [1.0, 0.0], "1": [0.0, 1.0]},
        }
    )

    assert isinstance(spec, MarkovSpec)
    table = enumerate_traces(create_program(spec))
    assert sorted(record.trace for record in table) == [(0, 0), (1, 1)]
    assert isinstance(create_expander(spec), MarkovExpander)


def test_markov_spec_with_random_tables():
    spec = parse_program_spec({"kind": "markov", "vocabulary_size": 3, "length": 2, "random_seed": 4})

    first = enumerate_traces(create_program(spec)).probabilities()
    second = enumerate_traces(create_program(spec)).probabilities()

    assert first == second
    assert len(first) == 9


def test_variable_length_markov_spec_uses_the_program_expander():
    spec = parse_program_spec(
        {"kind": "markov", "vocabulary_size": 2, "order": 0, "default": [0.5, 0.5], "length_distribution": [0.5, 0.5]}
    )

    assert isinstance(create_expander(spec), ProgramExpander)


def test_explicit_spec(tmp_path):
    path = tmp_path / "program.json"
    path.write_text(
        json.dumps(
            {
                "kind": "explicit",
                "traces": [
                    {"trace": [0], "probability": 0.25, "output": [1, 2]},
                    {"trace": [1, 0], "probability": 0.75},
                ],
            }
        ),
        encoding="utf-8",
    )

    spec = load_program_spec(path)

    assert isinstance(spec, ExplicitSpec)
    assert enumerate_traces(create_program(spec)).outputs() == {(0,): (1, 2), (1, 0): (1, 0)}


@pytest.mark.parametrize(
    "payload",
    [
        "{not json",
        '{"kind": "circle"}',
        '{"kind": "toy", "extra": 1}',
        '{"kind": "markov", "vocabulary_size": 0}',
        '{"kind": "markov", "vocabulary_size": 2, "tables": {"a,b": [0.5, 0.5]}}',
        '{"kind": "explicit", "traces": []}',
        '{"kind": "explicit", "traces": [{"trace": [-1], "probability": 1.0}]}',
        "[1, 2]",
    ],
)
def test_invalid_specs_raise_parse_error(payload):
    with pytest.raises(ParseError):
        parse_program_spec(payload)


@pytest.mark.parametrize(
    "payload",
    [
        {"kind": "markov", "vocabulary_size": 2, "length": 1, "tables": {"": [0.5, 0.25, 0.25]}},
        {"kind": "markov", "vocabulary_size": 2, "length": 2, "tables": {"": [0.5, 0.5]}},
        {"kind": "explicit", "traces": [{"trace": [0], "probability": 0.5}]},
        {"kind": "explicit", "traces": [{"trace": [0], "probability": 0.5}, {"trace": [0, 1], "probability": 0.5}]},
        {
            "kind": "explicit",
            "traces": [
                {"trace": [0], "probability": 0.5},
                {"trace": [0], "probability": 0.5},
                {"trace": [1], "probability": 0.5},
            ],
        },
    ],
)
def test_invalid_programs_raise_parse_error(payload):
    spec = parse_program_spec(payload)

    with pytest.raises(ParseError):
        create_program(spec)


def test_missing_spec_file(tmp_path):
    with pytest.raises(ParseError):
        load_program_spec(tmp_path / "absent.json")
