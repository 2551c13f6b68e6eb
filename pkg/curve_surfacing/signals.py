from django.dispatch import Signal


# kwargs: hypothesis, old_status, new_status
hypothesis_status_changed = Signal()

# kwargs: stage, directory
stage_completed = Signal()
