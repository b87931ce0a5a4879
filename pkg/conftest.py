"""
Shared fixtures: factories for the ORM models, an authenticated API client,
eager Celery, and the material models the numeric suites keep reusing.
"""
import factory
import numpy as np
import pytest
from django.contrib.auth import get_user_model
from faker import Faker
from rest_framework.test import APIClient

from experiments.models import ExperimentRun
from mean_field.materials import MaterialModel
from mean_field.models import Material

fake = Faker()

# Reference material: S = 3/2, g = 2, z = 6 calibrated to T_c = 83 K
REFERENCE_TC = 83.0


class UserFactory(factory.django.DjangoModelFactory):
    class Meta:
        model = get_user_model()
        django_get_or_create = ('username',)

    username = factory.Sequence(lambda n: f"physicist_{n}")
    email = factory.LazyAttribute(lambda _: fake.email())
    password = factory.PostGenerationMethodCall('set_password', 'password123')


class MaterialFactory(factory.django.DjangoModelFactory):
    class Meta:
        model = Material

    name = factory.Sequence(lambda n: f"{fake.last_name()} ferromagnet {n}")
    spin = 1.5
    lande_g = 2.0
    neighbors = 6
    target_critical_temperature = REFERENCE_TC
    lambda_prime_ratio = 0.0


class ExperimentRunFactory(factory.django.DjangoModelFactory):
    class Meta:
        model = ExperimentRun

    kind = 'roundtrip'
    parameters = factory.LazyFunction(lambda: {'temperatures': [41.5]})
    output_format = 'csv'
    requested_by = factory.SubFactory(UserFactory)


@pytest.fixture
def user(db):
    return UserFactory()


@pytest.fixture
def api_client(user):
    client = APIClient()
    client.force_authenticate(user=user)
    return client


@pytest.fixture
def eager_celery():
    from FerroWriterBackend.celery import app
    app.conf.CELERY_TASK_ALWAYS_EAGER = True
    yield app
    app.conf.CELERY_TASK_ALWAYS_EAGER = False


@pytest.fixture
def media_root(settings, tmp_path):
    settings.MEDIA_ROOT = str(tmp_path / 'media')
    return tmp_path / 'media'


@pytest.fixture
def second_order():
    return MaterialModel.from_critical_temperature(REFERENCE_TC)


@pytest.fixture
def first_order():
    # λ'/λ = 1 in reduced units, well above the S = 3/2 threshold (about 0.408)
    return MaterialModel.from_critical_temperature(REFERENCE_TC, lambda_prime_ratio=1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
