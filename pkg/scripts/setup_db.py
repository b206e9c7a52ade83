#!/usr/bin/env python3
"""
Golden store maintenance for topsocle
Creates, resets or inspects the tables holding recorded socle goldens
"""

import sys
from pathlib import Path

# Add the project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from sqlalchemy import func, inspect, select

from topsocle import database
from topsocle.Config import settings
import logging

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

EXPECTED_TABLES = ['socle_goldens', 'verification_runs']


def main():
    """Initialize the golden store"""
    logger.info("🚀 Starting golden store initialization...")
    logger.info(f"Database URL: {settings.database_url}")

    try:
        logger.info("📋 Creating tables...")
        database.init_db()

        tables = inspect(database.engine).get_table_names()
        missing_tables = [table for table in EXPECTED_TABLES if table not in tables]

        if missing_tables:
            logger.error(f"❌ Missing tables: {missing_tables}")
            return False

        logger.info(f"✅ Tables ready: {', '.join(tables)}")
        return True

    except Exception as e:
        logger.error(f"❌ Golden store initialization failed: {e}")
        return False


def reset_database(assume_yes: bool = False):
    """Drop and recreate all tables (WARNING: This will delete all goldens!)"""
    logger.warning("⚠️  WARNING: This will delete ALL recorded goldens!")
    if not assume_yes:
        response = input("Are you sure you want to continue? (yes/no): ")
        if response.lower() != 'yes':
            logger.info("❌ Reset cancelled")
            return False

    try:
        logger.info("🗑️ Dropping all tables...")
        database.drop_tables()

        logger.info("📋 Recreating tables...")
        database.create_tables()

        logger.info("✅ Golden store reset completed successfully!")
        return True

    except Exception as e:
        logger.error(f"❌ Reset failed: {e}")
        return False


def check_database_status():
    """Report table sizes and the presets with goldens"""
    logger.info("🔍 Checking golden store status...")

    try:
        tables = inspect(database.engine).get_table_names()
        if not tables:
            logger.info("No tables yet; run `setup_db.py init`")
            return True

        db = database.get_db_session()
        try:
            logger.info("📊 Golden store status:")
            for model in (database.SocleGolden, database.VerificationRun):
                if model.__tablename__ in tables:
                    count = db.scalar(select(func.count()).select_from(model))
                    logger.info(f"    {model.__tablename__}: {count} records")
            if 'socle_goldens' in tables:
                rows = db.execute(
                    select(database.SocleGolden.preset, database.SocleGolden.characteristic, func.count())
                    .group_by(database.SocleGolden.preset, database.SocleGolden.characteristic)
                ).all()
                for preset, characteristic, count in rows:
                    logger.info(f"    {preset} (char {characteristic}): {count} ells")
        finally:
            db.close()
        return True

    except Exception as e:
        logger.error(f"❌ Status check failed: {e}")
        return False


if __name__ == "__main__":
    import argparse

    parser = argparse.ArgumentParser(description="topsocle golden store management")
    parser.add_argument("action", choices=["init", "reset", "status"],
                        help="Action to perform")
    parser.add_argument("--yes", action="store_true", help="Skip the reset confirmation")

    args = parser.parse_args()

    if args.action == "init":
        success = main()
    elif args.action == "reset":
        success = reset_database(args.yes)
    else:
        success = check_database_status()
    sys.exit(0 if success else 1)
