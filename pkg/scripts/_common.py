from pathlib import Path

CORPUS = Path(__file__).resolve().parent.parent / "src" / "teleo" / "corpus"


def corpus_path(name: str) -> str:
    return str(CORPUS / name)
