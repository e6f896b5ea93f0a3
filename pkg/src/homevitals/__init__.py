"""homevitals: wristband vitals pipeline for a smart home.

Synthetic wristband sessions stream into an ingestion/query service; the
pipeline covers EDA/BVP/IBI/ST processing, cortisol-labeled stress
classification, PPG-only blood-pressure regression, and timestamp-matched
indoor location resolution.
"""

__version__ = "0.1.0"
