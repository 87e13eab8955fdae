'''
Module for functions dealing with the results database.

Created on 19-10-2026
@author: Harry New

'''
from pathlib import Path

from sqlalchemy.engine import Engine
from sqlmodel import create_engine, SQLModel, MetaData

from app.core.config import settings

# - - - - - - - - - - - - - - - - - - -

_engines: dict[str, Engine] = {}

# - - - - - - - - - - - - - - - - - - -

def get_engine(out_dir: Path) -> Engine:
    """
    Get engine for the results database inside an output directory.

    Args:
        out_dir (Path): Output directory.

    Returns:
        Engine: SQLAlchemy engine, cached per database path.
    """
    db_path = (Path(out_dir) / settings.RESULTS_DB_NAME).resolve()
    key = str(db_path)
    if key not in _engines:
        db_path.parent.mkdir(parents=True, exist_ok=True)
        _engines[key] = create_engine(f"sqlite:///{db_path}")
    return _engines[key]


def create_db_and_tables(engine: Engine):
    """
    Create tables in db.
    """
    SQLModel.metadata.create_all(engine)


def clear_db(engine: Engine):
    """
    Clear all previous tables in database.
    """
    metadata = MetaData()
    metadata.reflect(bind=engine)
    metadata.drop_all(bind=engine)
