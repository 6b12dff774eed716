"""
Simulation of cascaded quantum networks built from giant unidirectional emitters (GUEs).

The package version is stored only in pyproject.toml. To retrieve it from code, use
``importlib.metadata.version("qnet")``.
"""
