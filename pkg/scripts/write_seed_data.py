"""Regenerate the bundled lexicon TSVs from the composition tables."""

from pathlib import Path

from attrasr import japanese, mandarin
from attrasr.lexicon import Lexicon, dump_lexicon

DATA = Path(__file__).resolve().parent.parent / "src" / "attrasr" / "data"


def main() -> None:
    DATA.mkdir(parents=True, exist_ok=True)
    for name, entries in (
        ("mandarin", mandarin.build_seed_entries()),
        ("japanese", japanese.build_seed_entries()),
    ):
        lex = Lexicon(entries, language=name)
        path = DATA / f"{name}_syllables.tsv"
        path.write_text(dump_lexicon(lex), encoding="utf-8")
        print(f"{path}: {len(lex)} entries")


if __name__ == "__main__":
    main()
