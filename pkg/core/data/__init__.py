"""Data layer -- flat CSV / JSON / SVG files under the output directory."""
