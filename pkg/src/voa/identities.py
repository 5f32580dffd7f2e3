"""Identity-file driver.

An identity file is plain text: '#' comments, named field definitions
(`name := expr`), and a final assertion line:

    assert_zero EXPR
    assert_singular EXPR | gen1 gen2 ... @ k=RATIONAL
    assert_decouples TARGET | gen1 gen2 ... @ generic
    assert_decouples TARGET | gen1 gen2 ... @ k=RATIONAL

Expressions use the field grammar; names resolve through the file's own
definitions first, then the context's named-field dictionary.  This keeps
the text transcriptions reviewable as data, not code.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

from .fields import print_field, Field
from .lab import NameResolver, attach_names, decouple, singular_check


class IdentityFileError(ValueError):
    pass


class LayeredNames:
    def __init__(self, base, local):
        self.base = base
        self.local = local

    def __contains__(self, name):
        return name in self.local or (self.base is not None and name in self.base)

    def __getitem__(self, name):
        if name in self.local:
            return self.local[name]
        if self.base is not None:
            return self.base[name]
        raise KeyError(name)


def resolve_identity_path(source):
    """An identity-file path; bare names fall back to the shipped data."""
    p = Path(source)
    if p.exists():
        return p
    from .library import DATA_DIR
    for group in sorted((DATA_DIR / "identities").iterdir()):
        cand = group / p.name
        if cand.exists():
            return cand
    raise FileNotFoundError(f"identity file {source!r} not found")


def parse_level(text):
    text = text.strip()
    if text == "generic":
        return None
    if not text.startswith("k="):
        raise IdentityFileError(f"expected 'k=<rational>' or 'generic', got {text!r}")
    return Fraction(text[2:])


def residual_summary(ctx, f, limit=5):
    """The first few residual monomials, for diagnosing transcription typos."""
    if f.is_zero():
        return ""
    monos = f.support_sorted(ctx.gens)[:limit]
    part = Field({m: f.t[m] for m in monos})
    text = print_field(part, ctx.gens)
    if len(f.t) > limit:
        text += f" ... ({len(f.t)} monomials total)"
    return text


def run_identity_file(ctx, source):
    """Execute one identity file against a context; returns a result dict."""
    if isinstance(source, (str, Path)) and "\n" not in str(source):
        source = resolve_identity_path(source)
        text = Path(source).read_text()
        name = Path(source).name
    else:
        text = str(source)
        name = "<inline>"
    if not isinstance(getattr(ctx, "names", None), NameResolver):
        attach_names(ctx)
    local = {}
    names = LayeredNames(ctx.names, local)
    assertion = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if assertion is not None:
            raise IdentityFileError(
                f"{name}:{lineno}: the assertion must be the final statement")
        if ":=" in line:
            defname, expr = (part.strip() for part in line.split(":=", 1))
            if not defname.isidentifier():
                raise IdentityFileError(f"{name}:{lineno}: bad name {defname!r}")
            local[defname] = ctx.parse(expr, names=names)
            continue
        for kind in ("assert_zero", "assert_singular", "assert_decouples"):
            if line.startswith(kind):
                assertion = (kind, line[len(kind):].strip(), lineno)
                break
        else:
            raise IdentityFileError(f"{name}:{lineno}: unrecognized line {raw!r}")
    if assertion is None:
        raise IdentityFileError(f"{name}: no assertion found")
    kind, rest, lineno = assertion
    out = {"file": name, "assertion": kind, "passed": False,
           "residual": "", "exceptional_levels": []}
    if kind == "assert_zero":
        f = ctx.parse(rest, names=names)
        out["passed"] = f.is_zero()
        out["residual"] = residual_summary(ctx, f)
        return out
    body, _, level_text = rest.rpartition("@")
    if not _:
        raise IdentityFileError(f"{name}:{lineno}: missing '@ <level>'")
    level = parse_level(level_text)
    expr_text, _, gens_text = body.partition("|")
    if not _:
        raise IdentityFileError(f"{name}:{lineno}: missing '| gens'")
    target = ctx.parse(expr_text.strip(), names=names)
    gen_names = gens_text.split()
    gens_list = [(g, names[g] if g in names else ctx.parse(g, names=names))
                 for g in gen_names]
    if kind == "assert_singular":
        if level is None:
            ok, fails = singular_check(ctx, target, gens_list)
        else:
            ok, fails = singular_check(ctx, target, gens_list, level=level)
        out["passed"] = ok
        if fails:
            gname, n, r = fails[0]
            out["residual"] = (f"{gname}_({n}) residual: "
                               f"{residual_summary(ctx, r)}"
                               f" [{len(fails)} failing modes]")
        return out
    # only the part of the named set below the target weight can appear
    from .fields import weight_of
    w = weight_of(ctx.gens, target)
    gens_list = [(g, f) for g, f in gens_list if weight_of(ctx.gens, f) < w]
    sol = decouple(ctx, target, gens_list, level=level)
    if sol is None:
        out["residual"] = "target is not in the span"
        return out
    out["passed"] = True
    out["exceptional_levels"] = sorted(str(q) for q in sol.exceptional_levels)
    return out
