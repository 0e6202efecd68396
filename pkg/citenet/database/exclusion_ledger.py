import json
import sqlite3
from typing import Dict, List, Optional, Sequence, Set

from citenet.config.settings import settings
from citenet.errors import ParameterError


class ExclusionLedger:
    """
    Persistent record of reviewers' exclusion decisions. Recorded doc_ids
    feed back into screening as manual exclusions on later runs.
    """
    def __init__(self, db_path: Optional[str] = None):
        self.db_path = db_path or settings.LEDGER_PATH
        self.init_database()

    def _connect(self) -> sqlite3.Connection:
        conn = sqlite3.connect(self.db_path)
        conn.row_factory = sqlite3.Row
        return conn

    def init_database(self):
        """Initialize the database with required tables"""
        conn = self._connect()
        cursor = conn.cursor()

        cursor.execute('''
            CREATE TABLE IF NOT EXISTS exclusions (
                id INTEGER PRIMARY KEY AUTOINCREMENT,
                doc_id TEXT NOT NULL,
                reason TEXT NOT NULL,
                reviewer TEXT,
                component TEXT,
                recorded_at DATETIME DEFAULT CURRENT_TIMESTAMP,
                revoked BOOLEAN DEFAULT 0
            )
        ''')

        conn.commit()
        conn.close()

    def record_exclusion(self, doc_id: str, reason: str, reviewer: Optional[str] = None,
                         component: Optional[Sequence[str]] = None) -> int:
        """Save one exclusion decision; component is the outlier's provision labels"""
        if not doc_id:
            raise ParameterError("doc_id is required")
        if not reason:
            raise ParameterError("an exclusion needs a reason")

        conn = self._connect()
        cursor = conn.cursor()
        cursor.execute('''
            INSERT INTO exclusions (doc_id, reason, reviewer, component)
            VALUES (?, ?, ?, ?)
        ''', (doc_id, reason, reviewer, json.dumps(list(component)) if component else None))

        exclusion_id = cursor.lastrowid
        conn.commit()
        conn.close()
        return exclusion_id

    def revoke(self, doc_id: str) -> int:
        """Withdraw every active decision on a doc; returns how many were revoked"""
        conn = self._connect()
        cursor = conn.cursor()
        cursor.execute('UPDATE exclusions SET revoked = 1 WHERE doc_id = ? AND revoked = 0', (doc_id,))
        count = cursor.rowcount
        conn.commit()
        conn.close()
        return count

    def excluded_ids(self) -> Set[str]:
        conn = self._connect()
        cursor = conn.cursor()
        cursor.execute('SELECT DISTINCT doc_id FROM exclusions WHERE revoked = 0')
        ids = {row["doc_id"] for row in cursor.fetchall()}
        conn.close()
        return ids

    def exclusion_history(self, limit: int = 100) -> List[Dict]:
        """Decisions, newest first"""
        conn = self._connect()
        cursor = conn.cursor()
        cursor.execute('''
            SELECT * FROM exclusions
            ORDER BY id DESC
            LIMIT ?
        ''', (limit,))
        rows = [dict(row) for row in cursor.fetchall()]
        conn.close()

        for row in rows:
            row["component"] = json.loads(row["component"]) if row["component"] else []
            row["revoked"] = bool(row["revoked"])
        return rows

    def exclusion_stats(self) -> Dict:
        conn = self._connect()
        cursor = conn.cursor()

        cursor.execute('''
            SELECT reason, COUNT(*) as count
            FROM exclusions
            WHERE revoked = 0
            GROUP BY reason
            ORDER BY reason
        ''')
        by_reason = {row["reason"]: row["count"] for row in cursor.fetchall()}

        cursor.execute('SELECT COUNT(*) FROM exclusions')
        total = cursor.fetchone()[0]

        conn.close()
        return {
            "total_decisions": total,
            "active": sum(by_reason.values()),
            "revoked": total - sum(by_reason.values()),
            "by_reason": by_reason,
        }
