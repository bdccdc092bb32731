"""Trusted AI bill of materials toolkit.

Python bindings over the C++ core: content hashing, signed attestation
envelopes, the content-addressed store, chain verification, poisoning
audits, SBOM/CVE ingestion and impact propagation, and the pipeline
workflow operations.
"""

from taibom._taibom import *  # noqa: F401,F403
from taibom._taibom import __doc__  # noqa: F401

__version__ = "0.1.0"
