"""Interactive multimodal video retrieval engine.

Submodules:
    threshold     adaptive shot-boundary thresholding (KDE + GMM + Bayes risk)
    keyframes     K-Means exemplar selection over frame features
    embed_index   exact cosine top-k search over named embedding spaces
    grid_meta     7x7 grid tokens, color cells, fuzzy metadata/text search
    fusion        RRF, query-expansion fusion, temporal event retrieval
    providers     query-expansion and text-embedding providers (mock + HTTP)
    ingest        corpus manifest loading and validation
    search        stage-query parsing/resolution shared by CLI and service
    service       FastAPI HTTP service
    cli           operator command line
"""

__version__ = "0.1.0"
