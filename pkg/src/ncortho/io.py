"""Text formats: complex numbers as ``a+bi``, kernels as CSV, everything else as JSON."""

from __future__ import annotations

import csv
import io as _io
import json
from typing import Any, Iterable, TextIO

import numpy as np

from .fock_multivar import CTKernel, GammaParamsCT
from .hermitian_jacobi import HermitianMoments, JacobiFamily
from .schur_params import GammaParams1D, MomentKernel1D
from .words import Word


def format_complex(z: complex) -> str:
    z = complex(z)
    re, im = z.real + 0.0, z.imag + 0.0
    sign = "-" if np.signbit(im) else "+"
    return f"{re!r}{sign}{abs(im)!r}i"


def parse_complex(text: Any) -> complex:
    if isinstance(text, (int, float, complex)):
        return complex(text)
    if isinstance(text, dict):
        return complex(float(text["re"]), float(text.get("im", 0.0)))
    s = str(text).strip().replace(" ", "")
    if not s:
        raise ValueError("empty complex literal")
    return complex(s.replace("i", "j"))


def complex_matrix_to_json(M: np.ndarray) -> list:
    return [[format_complex(v) for v in row] for row in np.atleast_2d(M)]


def complex_matrix_from_json(rows: list) -> np.ndarray:
    return np.array([[parse_complex(v) for v in row] for row in rows], dtype=complex)


# --- CSV -------------------------------------------------------------------------

def _cell(v: Any) -> str:
    s = format_complex(v) if isinstance(v, (complex, np.complexfloating)) else str(v)
    return f'"{s}"' if "+" in s else s


def write_csv_rows(rows: Iterable[Iterable[Any]], out: TextIO) -> None:
    for row in rows:
        out.write(",".join(_cell(v) for v in row) + "\n")


def matrix_to_csv(M: np.ndarray) -> str:
    buf = _io.StringIO()
    write_csv_rows(([complex(v) for v in row] for row in M), buf)
    return buf.getvalue()


def matrix_from_csv(text: str) -> np.ndarray:
    rows = [r for r in csv.reader(_io.StringIO(text)) if r and any(c.strip() for c in r)]
    if not rows:
        raise ValueError("empty matrix file")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError("ragged matrix rows")
    return np.array([[parse_complex(c) for c in r] for r in rows], dtype=complex)


def kernel_from_csv(text: str) -> MomentKernel1D:
    M = matrix_from_csv(text)
    if M.shape[0] != M.shape[1]:
        raise ValueError("kernel must be square")
    return MomentKernel1D(M)


# --- one-variable parameters -----------------------------------------------------

def params_to_json(p: GammaParams1D) -> dict:
    return {
        "horizon": p.horizon,
        "diag": [float(x) for x in p.diag],
        "gamma": [{"k": k, "j": j, "value": format_complex(p.gamma[k, j])} for k, j in p.pairs()],
    }


def params_from_json(obj: dict) -> GammaParams1D:
    diag = np.asarray(obj["diag"], dtype=float)
    pairs = {}
    for item in obj.get("gamma", []):
        pairs[int(item["k"]), int(item["j"])] = parse_complex(item["value"])
    if "horizon" in obj and int(obj["horizon"]) != len(diag) - 1:
        raise ValueError("horizon does not match the diagonal length")
    return GammaParams1D.from_pairs(diag, pairs)


# --- several variables -----------------------------------------------------------

def ct_params_to_json(p: GammaParamsCT) -> dict:
    return {
        "N": p.N,
        "max_len": p.max_len,
        "s_empty": p.s_empty,
        "gamma": [{"word": str(w), "value": format_complex(g)} for w, g in
                  sorted(p.gamma.items(), key=lambda kv: kv[0].key())],
    }


def ct_params_from_json(obj: dict) -> GammaParamsCT:
    N = int(obj["N"])
    gamma = {Word.parse(item["word"], N): parse_complex(item["value"]) for item in obj.get("gamma", [])}
    return GammaParamsCT(N, int(obj["max_len"]), float(obj.get("s_empty", 1.0)), gamma)


def ct_kernel_to_json(K: CTKernel) -> list:
    items = sorted(K.entries.items(), key=lambda kv: (kv[0][0].key(), kv[0][1].key()))
    return [{"sigma": str(a), "tau": str(b), "re": float(v.real), "im": float(v.imag)}
            for (a, b), v in items]


def ct_kernel_from_json(items: list, N: int, max_len: int) -> CTKernel:
    K = CTKernel(N, max_len)
    for it in items:
        K.entries[Word.parse(it["sigma"], N), Word.parse(it["tau"], N)] = complex(it["re"], it["im"])
    return K


def operators_to_json(Z: Iterable[np.ndarray]) -> list:
    return [complex_matrix_to_json(z) for z in Z]


def operators_from_json(obj: list) -> list[np.ndarray]:
    return [complex_matrix_from_json(m) for m in obj]


def jacobi_to_json(J: JacobiFamily) -> dict:
    return {
        "N": J.N,
        "levels": [{"A": [complex_matrix_to_json(a) for a in J.A[n]],
                    "B": [complex_matrix_to_json(b) for b in J.B[n]]} for n in range(J.depth)],
    }


def jacobi_from_json(obj: dict) -> JacobiFamily:
    N = int(obj["N"])
    levels = obj["levels"]
    A = [[complex_matrix_from_json(a) for a in lvl["A"]] for lvl in levels]
    B = [[complex_matrix_from_json(b) for b in lvl["B"]] for lvl in levels]
    return JacobiFamily(N, len(levels), A, B)


def moments_to_json(m: HermitianMoments) -> list:
    items = sorted(m.s.items(), key=lambda kv: kv[0].key())
    return [{"word": str(w), "value": format_complex(v)} for w, v in items]


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, default=_json_default) + "\n"


def _json_default(o: Any):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, (complex, np.complexfloating)):
        return format_complex(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")
