"""Paved-road vs dirt-trail classification of cycling GPS rides from the
lateral wiggle of the track."""

__version__ = "0.1.0"
