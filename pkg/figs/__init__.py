"""File-driven figure rendering for fourex CSV output."""
