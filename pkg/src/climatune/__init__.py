"""Query-based sonification of Tokyo's temperature record.

An attention-LSTM melody model trained on Japanese melodies is sampled
with per-year softmax temperatures derived from the 1876-2021 monthly
air-temperature table: the pitch temperature from each year's
dissimilarity to the reference year, the duration temperature from its
normalized annual mean.
"""

__version__ = "0.1.0"
