"""Command-line front end: metric files, commands and report rendering."""
