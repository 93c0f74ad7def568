import os
from dotenv import load_dotenv

# Load .env file (try multiple paths)
load_dotenv()  # Current directory
load_dotenv(os.path.join(os.path.dirname(__file__), '..', '.env'))  # Project root
load_dotenv(os.path.join(os.path.dirname(__file__), '..', '..', '.env'))  # Parent directory

class Config:
    """Configuration class to hold all config variables"""

    # Enumeration limits
    ANCHOR_LIMIT = int(os.getenv("ANCHOR_LIMIT", "16"))  # Anchors per pattern or subset enumeration
    INDEX_SEARCH_LIMIT = int(os.getenv("INDEX_SEARCH_LIMIT", str(2 ** 20)))  # Largest Calkin-Wilf index searched
    MAX_CODE_BITS = int(os.getenv("MAX_CODE_BITS", "4096"))  # Largest 2-exponent materialized as a rational
    CACHE_SIZE = int(os.getenv("CACHE_SIZE", "4096"))  # Eliminations and normal forms kept per service

    # Certificates and corpora
    CERTIFICATE_DEPTH = int(os.getenv("CERTIFICATE_DEPTH", "10"))
    CORPUS_SEED = int(os.getenv("CORPUS_SEED", "20240917"))

    # Output
    OUTPUT_FORMAT = os.getenv("OUTPUT_FORMAT", "text")  # text or structured
    LOG_LEVEL = os.getenv("LOG_LEVEL", "WARNING")

# Enumeration limits
ANCHOR_LIMIT = Config.ANCHOR_LIMIT
INDEX_SEARCH_LIMIT = Config.INDEX_SEARCH_LIMIT
MAX_CODE_BITS = Config.MAX_CODE_BITS
CACHE_SIZE = Config.CACHE_SIZE

# Certificates and corpora
CERTIFICATE_DEPTH = Config.CERTIFICATE_DEPTH
CORPUS_SEED = Config.CORPUS_SEED
