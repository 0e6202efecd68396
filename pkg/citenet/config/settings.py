import os
from dotenv import load_dotenv

load_dotenv()

CONFIG_DIR = os.path.dirname(os.path.abspath(__file__))
DATA_DIR = os.path.join(os.path.dirname(CONFIG_DIR), "data")


class Settings:
    # Bundled declarative inputs
    RULES_PATH = os.getenv("CITENET_RULES_PATH", os.path.join(CONFIG_DIR, "citation_rules.json"))
    SCREENING_PATH = os.getenv("CITENET_SCREENING_PATH", os.path.join(CONFIG_DIR, "screening.json"))
    REFERENCE_CORPUS = os.path.join(DATA_DIR, "reference_corpus.jsonl")
    REFERENCE_NETWORK = os.path.join(DATA_DIR, "reference_network.csv")

    # Network construction
    DEFAULT_MIN_WEIGHT = int(os.getenv("CITENET_MIN_WEIGHT", "1"))

    # Density at or below this is a sparse network
    SPARSE_DENSITY_THRESHOLD = float(os.getenv("CITENET_SPARSE_THRESHOLD", "0.25"))

    # Typology
    BATCH_MIN = int(os.getenv("CITENET_BATCH_MIN", "3"))
    DEFAULT_CLUSTER_THRESHOLD = float(os.getenv("CITENET_CLUSTER_THRESHOLD", "0.5"))
    DEFAULT_CORE_CRITERION = os.getenv("CITENET_CORE_CRITERION", "top-k=5")
    HOTSPOT_TOP_N = int(os.getenv("CITENET_HOTSPOT_TOP_N", "3"))

    # Reports
    DEFAULT_OUTPUT_DIR = os.getenv("CITENET_OUTPUT_DIR", "output")
    DEFAULT_FORMATS = ("edge_csv", "graphml", "dot")
    REPORT_DECIMALS = 3

    # Exclusion ledger (judges' outlier decisions)
    LEDGER_PATH = os.getenv("CITENET_LEDGER_PATH", "exclusions.db")

    LOG_LEVEL = os.getenv("CITENET_LOG_LEVEL", "INFO")


settings = Settings()
