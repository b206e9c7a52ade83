from sqlalchemy import create_engine, Column, Integer, String, Boolean, DateTime, Text, UniqueConstraint
from sqlalchemy.orm import declarative_base, sessionmaker, Session
from sqlalchemy.sql import func
from pathlib import Path
from typing import List, Optional
import logging

from topsocle.Config import get_database_url

logger = logging.getLogger(__name__)


def _make_engine(url: str):
    return create_engine(
        url,
        echo=False,  # Set to True for SQL query debugging
        connect_args={"check_same_thread": False} if "sqlite" in url else {}
    )


# Create SQLAlchemy engine and session
engine = _make_engine(get_database_url())

SessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=engine)

Base = declarative_base()


class SocleGolden(Base):
    __tablename__ = "socle_goldens"
    __table_args__ = (UniqueConstraint("preset", "characteristic", "ell", name="uq_golden_cell"),)

    id = Column(Integer, primary_key=True, index=True)
    preset = Column(String(100), nullable=False, index=True)
    characteristic = Column(Integer, nullable=False)
    ell = Column(Integer, nullable=False)
    free_rank = Column(Integer, nullable=False)
    star_socle_total = Column(Integer, nullable=False)
    t_socle_total = Column(Integer, nullable=False)
    certified = Column(Boolean, default=False)
    recorded_at = Column(DateTime, default=func.now())


class VerificationRun(Base):
    __tablename__ = "verification_runs"

    id = Column(Integer, primary_key=True, index=True)
    preset = Column(String(100), nullable=True)
    verdict = Column(String(20), nullable=False)  # pass, fail, inconclusive
    rows = Column(Integer, nullable=False)
    jobs = Column(Integer, default=1)
    notes = Column(Text, nullable=True)
    created_at = Column(DateTime, default=func.now())


# Database utility functions
def configure(url: str) -> None:
    """Rebind the engine and session factory to another database URL"""
    global engine
    engine = _make_engine(url)
    SessionLocal.configure(bind=engine)


def _ensure_sqlite_dir(url: str) -> None:
    prefix = "sqlite:///"
    if url.startswith(prefix) and ":memory:" not in url:
        Path(url[len(prefix):]).parent.mkdir(parents=True, exist_ok=True)


def create_tables():
    """Create all database tables"""
    _ensure_sqlite_dir(str(engine.url))
    Base.metadata.create_all(bind=engine)


def drop_tables():
    """Drop all database tables (use with caution!)"""
    Base.metadata.drop_all(bind=engine)


def get_db_session() -> Session:
    """Get a new database session"""
    return SessionLocal()


def init_db():
    """Initialize database with tables"""
    create_tables()


def record_goldens(report, characteristic: int, db: Optional[Session] = None) -> int:
    """
    Store the per-ell totals of a verification report as goldens

    Existing goldens for the same preset and characteristic are replaced.

    Returns:
        int: number of rows written
    """
    if not report.preset:
        raise ValueError("goldens can only be recorded for a named preset")
    own = db is None
    db = db or get_db_session()
    try:
        db.query(SocleGolden).filter(
            SocleGolden.preset == report.preset,
            SocleGolden.characteristic == characteristic,
        ).delete()
        for r in report.socle_table:
            db.add(SocleGolden(
                preset=report.preset,
                characteristic=characteristic,
                ell=r.ell,
                free_rank=r.free_rank,
                star_socle_total=r.star_socle_total,
                t_socle_total=r.t_socle_total,
                certified=r.certified_zero_above,
            ))
        db.commit()
        logger.info(f"💾 recorded {len(report.socle_table)} goldens for {report.preset}")
        return len(report.socle_table)
    except Exception:
        db.rollback()
        raise
    finally:
        if own:
            db.close()


def compare_goldens(report, characteristic: int, db: Optional[Session] = None) -> List[str]:
    """
    Compare a report's per-ell totals with stored goldens

    Returns:
        List[str]: one message per discrepancy; empty when everything matches
    """
    own = db is None
    db = db or get_db_session()
    try:
        stored = {
            g.ell: g
            for g in db.query(SocleGolden).filter(
                SocleGolden.preset == report.preset,
                SocleGolden.characteristic == characteristic,
            )
        }
        if not stored:
            return [f"no goldens recorded for {report.preset} in characteristic {characteristic}"]
        out = []
        for r in report.socle_table:
            g = stored.get(r.ell)
            if g is None:
                continue
            observed = (r.free_rank, r.star_socle_total, r.t_socle_total)
            expected = (g.free_rank, g.star_socle_total, g.t_socle_total)
            if observed != expected:
                out.append(f"ell={r.ell}: observed {observed}, golden {expected}")
        return out
    finally:
        if own:
            db.close()


def log_run(report, jobs: int, db: Optional[Session] = None) -> None:
    """Append a verification run to the run log"""
    own = db is None
    db = db or get_db_session()
    try:
        db.add(VerificationRun(
            preset=report.preset,
            verdict=report.verdict.value,
            rows=len(report.socle_table),
            jobs=jobs,
            notes="\n".join(report.notes) or None,
        ))
        db.commit()
    except Exception:
        db.rollback()
        raise
    finally:
        if own:
            db.close()
