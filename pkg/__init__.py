"""Top-level package for uniprov.

This package organizes the modules that record and query statement-level
provenance in UniProt-style RDF:

- :mod:`rdf_core` holds RDF terms and the indexed :class:`~rdf_core.TripleSet`
  store; :mod:`turtle_io` reads and writes the Turtle subset.
- :mod:`evidence_model` encodes attributions as reified statements and finds
  annotated statements and stale attributions.
- :mod:`uniprot_xml` parses entry XML with evidence keys and converts it to RDF.
- :mod:`sparql` parses queries with the ``reification(S P O)`` shorthand,
  expands them and evaluates basic graph patterns.
- :mod:`corpus_gen` generates synthetic corpora and computes metadata
  statistics, charted by :mod:`stats_visuals`.
- :mod:`report_exporter` renders results as text and writes files atomically.

Configuration lives in :mod:`settings`, logging setup in :mod:`logger`.
The entry point is :func:`cli.main`, wrapped by ``main.py``.
"""
