# Result tables and SVG figures
