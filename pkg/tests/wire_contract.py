"""Reusable wire-protocol contract checks.

Any service claiming the generation protocol must pass these unchanged.
Each check takes a base URL and raises AssertionError with a readable
message on violation.

Protocol:
    POST {base}/generate  {"context": "<sentences joined by \\n>",
                           "max_new_tokens": <positive int>}
        -> 200 {"generated": "<one sentence>"}
        -> 4xx/5xx {"error": "<message>"}
    GET {base}/health -> 200 {"status": "ok", "model": "<identifier>"}
"""

from __future__ import annotations

import requests

DEFAULT_TIMEOUT = 30.0


def check_health(base_url: str, timeout: float = DEFAULT_TIMEOUT) -> dict:
    response = requests.get(f"{base_url}/health", timeout=timeout)
    assert response.status_code == 200, (
        f"/health answered {response.status_code}, expected 200"
    )
    body = response.json()
    assert isinstance(body, dict), f"/health body is {type(body).__name__}, not object"
    assert body.get("status") == "ok", f"/health status is {body.get('status')!r}"
    assert isinstance(body.get("model"), str) and body["model"], (
        f"/health model is {body.get('model')!r}, expected non-empty string"
    )
    return body


def check_generate(
    base_url: str,
    context: str,
    max_new_tokens: int = 32,
    timeout: float = DEFAULT_TIMEOUT,
) -> str:
    response = requests.post(
        f"{base_url}/generate",
        json={"context": context, "max_new_tokens": max_new_tokens},
        timeout=timeout,
    )
    assert response.status_code == 200, (
        f"/generate answered {response.status_code}: {response.text[:200]}"
    )
    body = response.json()
    assert isinstance(body, dict) and "generated" in body, (
        f"/generate body lacks 'generated': {body!r}"
    )
    sentence = body["generated"]
    assert isinstance(sentence, str), f"'generated' is {type(sentence).__name__}"
    assert "\n" not in sentence.strip(), f"'generated' spans lines: {sentence!r}"
    return sentence


def check_error_shape(response: requests.Response) -> None:
    assert 400 <= response.status_code < 600, (
        f"expected an error status, got {response.status_code}"
    )
    body = response.json()
    assert isinstance(body, dict) and isinstance(body.get("error"), str), (
        f"error responses must carry an 'error' string, got {body!r}"
    )


def check_rejects_malformed(base_url: str, timeout: float = DEFAULT_TIMEOUT) -> None:
    # missing the required context field
    response = requests.post(
        f"{base_url}/generate", json={"max_new_tokens": 8}, timeout=timeout
    )
    assert response.status_code == 400, (
        f"missing context should yield 400, got {response.status_code}"
    )
    check_error_shape(response)

    # body that is not a JSON object at all
    response = requests.post(
        f"{base_url}/generate",
        data=b"not json",
        headers={"Content-Type": "application/json"},
        timeout=timeout,
    )
    assert response.status_code == 400, (
        f"non-JSON body should yield 400, got {response.status_code}"
    )
    check_error_shape(response)


def check_deterministic(
    base_url: str,
    context: str,
    max_new_tokens: int = 32,
    timeout: float = DEFAULT_TIMEOUT,
) -> str:
    first = check_generate(base_url, context, max_new_tokens, timeout)
    second = check_generate(base_url, context, max_new_tokens, timeout)
    assert first == second, (
        f"identical requests answered differently: {first!r} vs {second!r}"
    )
    return first


def run_suite(base_url: str, context: str, timeout: float = DEFAULT_TIMEOUT) -> dict:
    """Run every check; returns the health payload for reporting."""
    health = check_health(base_url, timeout)
    check_generate(base_url, context, timeout=timeout)
    check_rejects_malformed(base_url, timeout)
    check_deterministic(base_url, context, timeout=timeout)
    return health
