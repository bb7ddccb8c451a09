"""Finite workbench for stratified comprehension, hereditarily finite
sets coded by well-founded extensional relations, Ramsey-style
indiscernible extraction and axiom-scheme instantiation."""

__version__ = "0.1.0"
