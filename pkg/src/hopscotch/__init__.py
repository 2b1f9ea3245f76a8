"""Interactive hopscotch music system: pad protocol, firmware simulator,
sieve composer, live event engine, soundscape renderer and metrics."""

__version__ = "0.1.0"
