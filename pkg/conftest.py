import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'nonlocal_koch.settings')
django.setup()
