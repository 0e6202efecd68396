import json
import logging
import os
import re
from typing import Dict, List, Optional, Pattern, Tuple

from pydantic import ValidationError

from citenet.config.settings import settings
from citenet.errors import RuleSetError
from citenet.models import CitationRule, CitationRuleSet, ProvisionId

logger = logging.getLogger(__name__)

# Separators between enumerated articles: 第六条、第一千零三十二条 / Art. 6, 1032
ARTICLE_SPLIT = re.compile(r"\s*(?:[、，,;；]|\band\b|及|和|与)\s*")
ARTICLE_TOKEN = re.compile(r"^(?:第)?(?P<num>[零〇一二两三四五六七八九十百千万\d]+)(?:条)?(?P<rest>.*)$")

CHINESE_DIGITS = {"零": 0, "〇": 0, "一": 1, "二": 2, "两": 2, "三": 3, "四": 4,
                  "五": 5, "六": 6, "七": 7, "八": 8, "九": 9}
CHINESE_UNITS = {"十": 10, "百": 100, "千": 1000, "万": 10000}
NUMERAL_PART = re.compile(r"\d+|.", re.DOTALL)


def chinese_to_int(text: str) -> int:
    """
    Convert a Chinese article numeral (一千零三十二) or ASCII digits to int.
    Digit runs may stand in for the multipliers of a mixed form (1千零32).
    """
    if text.isdecimal():
        return int(text)

    total, section, digit = 0, 0, 0
    for match in NUMERAL_PART.finditer(text):
        char = match.group()
        if char.isdecimal():
            digit = int(char)
        elif char in CHINESE_DIGITS:
            digit = CHINESE_DIGITS[char]
        elif char in CHINESE_UNITS:
            unit = CHINESE_UNITS[char]
            if unit == 10000:
                total += (section + digit) * unit
                section, digit = 0, 0
            else:
                # 十 on its own means 10
                section += (digit or 1) * unit
                digit = 0
        else:
            raise ValueError(f"not a numeral: {text!r}")
    return total + section + digit


class CompiledRule:
    def __init__(self, rule: CitationRule, pattern: Pattern):
        self.rule = rule
        self.pattern = pattern


class RuleLibrary:
    """
    Loaded, compiled and alias-resolved citation ruleset.
    Rule order is significant: on overlapping matches the earlier rule wins.
    """

    def __init__(self, ruleset: CitationRuleSet):
        self.ruleset = ruleset
        self.aliases = self._resolve_aliases(ruleset.aliases)
        self.rules = [self._compile(index, rule) for index, rule in enumerate(ruleset.rules)]

    @classmethod
    def load(cls, config_path: Optional[str] = None) -> "RuleLibrary":
        if config_path is None:
            config_path = settings.RULES_PATH

        if not os.path.exists(config_path):
            raise RuleSetError(f"ruleset not found: {config_path}")

        try:
            with open(config_path, "r", encoding="utf-8") as f:
                data = json.load(f)
            ruleset = CitationRuleSet.model_validate(data)
        except json.JSONDecodeError as e:
            raise RuleSetError(f"{config_path}: invalid JSON ({e})") from e
        except ValidationError as e:
            raise RuleSetError(f"{config_path}: {e}") from e

        library = cls(ruleset)
        logger.info("Loaded %d citation rules and %d aliases from %s",
                    len(library.rules), len(library.aliases), config_path)
        return library

    @staticmethod
    def _compile(index: int, rule: CitationRule) -> CompiledRule:
        try:
            pattern = re.compile(rule.pattern)
        except re.error as e:
            raise RuleSetError(f"rule {index}: pattern does not compile ({e})") from e

        if rule.article_capture not in pattern.groupindex:
            raise RuleSetError(f"rule {index}: pattern has no group named {rule.article_capture!r}")
        if rule.statute is None and "statute" not in pattern.groupindex:
            raise RuleSetError(f"rule {index}: no statute given and no 'statute' group in pattern")
        return CompiledRule(rule, pattern)

    @staticmethod
    def _resolve_aliases(aliases: Dict[str, str]) -> Dict[str, str]:
        """Follow alias chains to their canonical name; cycles are rejected"""
        resolved = {}
        for name in aliases:
            seen = [name]
            current = aliases[name]
            while current in aliases:
                if current in seen:
                    chain = " -> ".join(seen + [current])
                    raise RuleSetError(f"alias cycle: {chain}")
                seen.append(current)
                current = aliases[current]
            resolved[name] = current
        return resolved

    def canonical_statute(self, name: str) -> str:
        name = name.strip()
        return self.aliases.get(name, name)

    def find_citations(self, text: str) -> List[ProvisionId]:
        """
        Run every rule over the text and return provisions in order of
        appearance. Matches overlapping a span already claimed by an
        earlier rule are skipped.
        """
        claimed: List[Tuple[int, int]] = []
        found: List[Tuple[int, int, ProvisionId]] = []

        for compiled in self.rules:
            rule = compiled.rule
            for match in compiled.pattern.finditer(text):
                start, end = match.span()
                if any(start < c_end and c_start < end for c_start, c_end in claimed):
                    continue

                statute = rule.statute if rule.statute is not None else match.group("statute")
                if not statute:
                    logger.warning("Skipping match %r: statute group did not participate", match.group())
                    continue
                claimed.append((start, end))
                statute = self.canonical_statute(statute)
                articles = match.group(rule.article_capture) or ""
                for offset, article in enumerate(self._split_articles(articles)):
                    provision = ProvisionId(statute=statute, article=article, status=rule.status)
                    found.append((start, offset, provision))

        found.sort(key=lambda item: (item[0], item[1]))
        return [provision for _, _, provision in found]

    @staticmethod
    def _split_articles(captured: str) -> List[str]:
        articles = []
        for token in ARTICLE_SPLIT.split(captured.strip()):
            if not token:
                continue
            match = ARTICLE_TOKEN.match(token)
            if not match:
                logger.warning("Skipping unparseable article designator %r", token)
                continue
            try:
                number = str(chinese_to_int(match.group("num")))
            except ValueError:
                logger.warning("Skipping unparseable article designator %r", token)
                continue
            articles.append(number + match.group("rest").strip())
        return articles
